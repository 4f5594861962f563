#pragma once

#include "medmarg/distributions.hpp"
#include "medmarg/error.hpp"
#include "medmarg/estimation.hpp"
#include "medmarg/hypothesis.hpp"
#include "medmarg/marginal.hpp"
#include "medmarg/monte_carlo.hpp"
#include "medmarg/normal.hpp"
#include "medmarg/quadrature.hpp"
#include "medmarg/random.hpp"

#pragma once

namespace medmarg {

// Standard normal density.
double normal_pdf(double z) noexcept;

// Standard normal CDF, accurate to ~1e-16 absolute (erfc based).
double normal_cdf(double z) noexcept;

// Inverse of normal_cdf on (0,1). Wichura's AS241 (PPND16) rational
// approximation; relative accuracy about 1e-16. Throws DomainError for
// p outside (0,1).
double normal_quantile(double p);

}  // namespace medmarg

#pragma once

namespace qgreeks {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of the standard normal CDF on the open interval (0,1).
// Rational approximation refined by one Halley step; |Phi(x) - u| < 1e-9.
// Throws std::domain_error for u outside (0,1).
double inverse_normal_cdf(double u);

} // namespace qgreeks

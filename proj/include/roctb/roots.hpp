#pragma once

namespace roctb {

/// h(a, theta) = a^3 - 1 - (m/mu) a^2 (a + cos theta) / (a^2 + 1 + 2a cos theta)^{3/2}.
///
/// Zeros of h along theta = 0 and theta = pi are the ratios r/|q| a
/// homothetic three-body-collision path can hold. At theta = pi the quotient
/// is evaluated as sign(a - 1)/(a - 1)^2. Throws SingularityError at (1, pi).
double eval_h(double a, double theta, double mass_ratio);

double h_at_zero(double a, double mass_ratio);
double h_at_pi(double a, double mass_ratio);

/// Partial derivative of h in a, used for Newton polishing.
double dh_da(double a, double theta, double mass_ratio);

struct RootTriple {
    double mass_ratio;
    double alpha1;  // zero of h(., pi) on (0, 1)
    double alpha2;  // zero of h(., 0) on (1, inf)
    double alpha3;  // zero of h(., pi) on (1, inf)
};

RootTriple find_alphas(double mass_ratio);

/// min{ sin^2((phi - phi0)/2), cos^2((phi - phi0)/2) }; the constant in the
/// L2 bound ||z|| <= T / sqrt(2 C) ||z'|| on a two-ray path space.
double coercivity_constant(double phi, double phi0);

/// Exponent beta > 0 of small angular deviations theta ~ s^beta about the
/// theta = 0 homothetic path with ratio alpha, s the time to collision:
/// beta (beta + 1/3) = (2/9) (m/mu) / (alpha (1 + alpha)^3).
double angular_decay_exponent(double alpha, double mass_ratio);

}  // namespace roctb

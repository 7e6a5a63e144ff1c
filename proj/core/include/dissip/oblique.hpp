#ifndef DISSIP_OBLIQUE_HPP
#define DISSIP_OBLIQUE_HPP

#include <optional>
#include <vector>

#include "dissip/exponent.hpp"
#include "dissip/grid_function.hpp"
#include "dissip/operator_spec.hpp"
#include "dissip/tolerances.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

/// Boundary trace plus its harmonic extension sampled on horizontal layers.
struct HalfSpaceFunction {
  GridFunction boundary;                      // trace u on the R^(n-1) grid
  std::vector<double> levels;                 // heights x_n > 0
  std::vector<std::vector<Complex>> values;   // values[l][point]
};

/// Poisson-integral extension of u to the given positive levels; n is
/// u.dim_domain() + 1.  Throws DomainError for level <= 0.
HalfSpaceFunction harmonic_extension(const GridFunction& u, const std::vector<double>& levels);

/// Quadrature of the Poisson kernel over u's window at the given height
/// (unit-mass normalization check; approaches 1 for small heights).
double poisson_kernel_mass(const GridFunction& u, double level);

/// Re int <Lambda^(1/2) u, Lambda^(1/2) v> via the Fourier multiplier |xi|
/// on a periodic embedding padded by padding_factor (>= 4) times the box.
/// Equals the half-space Dirichlet energy of the harmonic extension when
/// u = v (Dirichlet-to-Neumann identity).
double lambda_half_form(const GridFunction& u, const GridFunction& v, int padding_factor = 4);

/// Applies Lambda^(1/2) spectrally and integrates |.|^2 in physical space;
/// equals lambda_half_form(u, u) up to roundoff (Parseval route).
double lambda_half_energy_physical(const GridFunction& u, int padding_factor = 4);

/// Half-space Dirichlet energy of the harmonic extension computed by the
/// independent Poisson-quadrature route: layers at spacing dt up to height.
double extension_dirichlet_energy(const GridFunction& u, double dt, double height);

/// Re L(u, |u|^{p-2}u) for the boundary form
/// L(f,g) = -int <Lambda^(1/2) f, Lambda^(1/2) g> + int <sum_j a_j d_j f, g>;
/// dissipativity of the oblique-derivative operator means <= 0 for all u.
double oblique_form(const GridFunction& u, const OperatorSpec& spec, const Exponent& e,
                    double eps0 = 1e-6, int padding_factor = 4);

/// Euclidean norm |Im a| of a constant coefficient vector (the operator norm
/// of the constant multiplier).
double multiplier_norm_constant(const Eigen::VectorXcd& a);
/// Field overload; throws UnsupportedError for non-constant fields.
double multiplier_norm_constant(const std::vector<Eigen::VectorXcd>& a_field);

struct ObliqueProbeOptions {
  int power_iters = 300;
  int padding_factor = 4;
};

/// Rayleigh supremum R* = sup_v [-int div(Re a) |v|^2 dx'] / E_harm(v),
/// computed by shifted power iteration on Lambda^(-1/2) M Lambda^(-1/2)
/// over the padded box, then certified by re-evaluating the windowed
/// eigenfunction on the original box.
struct RayleighResult {
  double ratio = 0.0;            // converged Ritz value
  double certified_ratio = 0.0;  // ratio re-evaluated at the windowed witness
  std::optional<GridFunction> v_star;
};
RayleighResult oblique_rayleigh_sup(const OperatorSpec& spec,
                                    const ObliqueProbeOptions& opts = {});

struct ObliqueCheck {
  Verdict verdict;
  std::optional<GridFunction> witness;
};

/// Real-coefficient oblique operator: necessary-and-sufficient test through
/// the trace inequality -1/p int div(a) |v|^2 <= 4/(pp') E_harm(v), i.e.
/// R* <= 4/p'.  A certified violation disproves dissipativity; otherwise the
/// best ratio is reported (Indeterminate when the sign shortcut
/// div a <= 0 does not apply).
ObliqueCheck check_real_oblique(const OperatorSpec& spec, const Exponent& e,
                                const ObliqueProbeOptions& opts = {},
                                const Tolerances& tol = {});

/// Dispatcher: real coefficients go through check_real_oblique; complex
/// constant coefficients are tested via the multiplier-norm smallness
/// condition |Im a| < 4/(pp') combined with the drift sign / Rayleigh ratio.
/// The band between the sufficient and necessary constants is reported
/// Indeterminate.
ObliqueCheck check_oblique(const OperatorSpec& spec, const Exponent& e,
                           const ObliqueProbeOptions& opts = {}, const Tolerances& tol = {});

}  // namespace dissip

#endif

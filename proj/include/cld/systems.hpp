#pragma once
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cld/field.hpp"

namespace cld {

/// Polytropic pressure closure p(rho) = kappa * rho^gamma with its pressure
/// potential P(rho) = rho * Int_1^rho p(z)/z^2 dz = kappa*rho*(rho^(g-1)-1)/(g-1).
struct PressureLaw {
  double kappa = 1.0;
  double gamma = 2.0;
  double p(double rho) const;
  double dp(double rho) const;
  double P(double rho) const;
  double dP(double rho) const;
  double ddP(double rho) const;
};

/// A first-order system div(F(U), A(U)) = 0 together with one companion pair:
/// scalar density eta(U), spatial flux q(U), and the row multiplier B(U)
/// satisfying D_U eta = B . D_U A and D_U q_j = B . D_U F_j on the state
/// domain. Rows may outnumber states: divergence constraints (e.g. the
/// magnetic constraint in MHD) contribute flux rows with no state of their
/// own, and B carries one multiplier per row.
///
/// Callable layouts (state vector U has n_states entries):
///   A, B : n_rows values.           dA, dB : n_rows x n_states row-major.
///   F    : [j * n_rows + row].      dF     : [(j * n_rows + row) * n_states + s].
///   eta  : scalar.                  deta   : n_states.
///   q    : k values.                dq     : [j * n_states + s].
struct SystemSpec {
  std::string name;
  int k = 0;        ///< spatial dimension
  int n_states = 0; ///< dim of U
  int n_rows = 0;   ///< rows of A/F/B (>= n_states)

  std::vector<std::string> state_names;
  std::vector<std::string> row_names;

  std::vector<double> sample_lo, sample_hi; ///< per-state sampling box
  std::vector<double> valid_lo, valid_hi;   ///< hard constraints (+-inf if none)
  std::vector<int> affine_rows;             ///< rows of (F,A) affine in U

  using VecFn = std::function<void(std::span<const double>, std::span<double>)>;
  VecFn A, dA, F, dF, B, dB, q, dq, deta;
  std::function<double(std::span<const double>)> eta;

  std::optional<PressureLaw> pressure;

  /// Throws (naming the state and index context) if U violates valid bounds.
  void require_valid(std::span<const double> U, std::size_t flat_index) const;
};

/// Names accepted by make_system, in registry order.
std::vector<std::string> registry_names();

/// Build a registered system at spatial dimension k (defaulted per system
/// when k == 0: burgers is 1-D, everything else 3-D). Unknown names throw.
SystemSpec make_system(const std::string& name, int k = 0);

enum class Eval { A, F, B, Eta, Q, G };

/// Pointwise evaluation of a system callable over a field whose components
/// are the states. Eval::G produces the n_rows x (k+1) flux block as
/// components [col * n_rows + row] with spatial columns first and the
/// transport column A last.
Field evaluate(const SystemSpec& sys, const Field& state, Eval which);

/// Same, restricted to the carrier box of an interior field (the padding
/// outside the box is never touched, so it need not be an admissible state).
InteriorField evaluate(const SystemSpec& sys, const InteriorField& state,
                       Eval which);

/// Compatibility audit: samples the state box and reports the worst
/// violation of the two defining identities plus the worst disagreement of
/// every analytic Jacobian against second-order central differences.
struct CompatReport {
  double max_eta_residual = 0.0;   // |D eta - B . dA|_inf
  double max_q_residual = 0.0;     // max_j |D q_j - B . dF_j|_inf
  double max_fd_mismatch = 0.0;    // relative, across A,F,B,eta,q Jacobians
  int samples = 0;
};
CompatReport check_compatibility(const SystemSpec& sys, int n_samples, std::uint64_t seed);

/// Largest second difference of (F,A) entries over the rows declared affine,
/// probed at sampled states; near machine zero when the metadata is right.
double affine_rows_second_difference(const SystemSpec& sys, int n_samples, std::uint64_t seed);

} // namespace cld

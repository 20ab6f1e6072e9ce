#include "cld/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cld/errors.hpp"
#include "cld/parallel.hpp"
#include "cld/rng.hpp"

namespace cld {

// ---------------------------------------------------------------------------
// Pressure law  p(rho) = kappa * rho^gamma,  with the associated potential
// normalized so that P(1) = 0:
//   P(rho) = kappa * rho * (rho^(gamma-1) - 1) / (gamma - 1).
// It satisfies rho P''(rho) = p'(rho) and P(rho) + p(rho) = rho P'(rho) + p0
// with p0 = p(1)/(gamma-1) folded into the normalization.
// ---------------------------------------------------------------------------

double PressureLaw::p(double rho) const { return kappa * std::pow(rho, gamma); }

double PressureLaw::dp(double rho) const {
  return kappa * gamma * std::pow(rho, gamma - 1.0);
}

double PressureLaw::P(double rho) const {
  return kappa * rho * (std::pow(rho, gamma - 1.0) - 1.0) / (gamma - 1.0);
}

double PressureLaw::dP(double rho) const {
  return kappa * (gamma * std::pow(rho, gamma - 1.0) - 1.0) / (gamma - 1.0);
}

double PressureLaw::ddP(double rho) const {
  return kappa * gamma * std::pow(rho, gamma - 2.0);
}

// ---------------------------------------------------------------------------
// SystemSpec helpers
// ---------------------------------------------------------------------------

void SystemSpec::require_valid(std::span<const double> U,
                               std::size_t flat_index) const {
  for (int s = 0; s < n_states; ++s) {
    if (U[s] < valid_lo[s] || U[s] > valid_hi[s]) {
      throw error("state '" + state_names[s] + "' = " + std::to_string(U[s]) +
                  " out of the admissible range at point " +
                  std::to_string(flat_index));
    }
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Common sampling boxes: velocity-like components in [-2,2], densities in
// [0.5,2], pressures in [-1,1].  Validity is unbounded except for densities,
// which must stay above 0.5 so that 1/rho terms are well conditioned.
void default_bounds(SystemSpec& s) {
  s.sample_lo.assign(s.n_states, -2.0);
  s.sample_hi.assign(s.n_states, 2.0);
  s.valid_lo.assign(s.n_states, -kInf);
  s.valid_hi.assign(s.n_states, kInf);
}

void density_bounds(SystemSpec& s, int slot) {
  s.sample_lo[slot] = 0.5;
  s.sample_hi[slot] = 2.0;
  s.valid_lo[slot] = 0.5;
}

void pressure_bounds(SystemSpec& s, int slot) {
  s.sample_lo[slot] = -1.0;
  s.sample_hi[slot] = 1.0;
}

std::string axis_suffix(int k, int j) {
  static const char* const xyz[3] = {"x", "y", "z"};
  if (k <= 3) return xyz[j];
  return std::to_string(j + 1);
}

// ---------------------------------------------------------------------------
// Scalar Burgers:  state u, density A = u, flux F = u^2/2, multiplier B = u,
// entropy eta = u^2/2 with flux q = u^3/3.
// ---------------------------------------------------------------------------

SystemSpec make_burgers() {
  SystemSpec s;
  s.name = "burgers";
  s.k = 1;
  s.n_states = 1;
  s.n_rows = 1;
  s.state_names = {"u"};
  s.row_names = {"u"};
  default_bounds(s);

  s.A = [](std::span<const double> U, std::span<double> out) { out[0] = U[0]; };
  s.dA = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  s.F = [](std::span<const double> U, std::span<double> out) {
    out[0] = 0.5 * U[0] * U[0];
  };
  s.dF = [](std::span<const double> U, std::span<double> out) {
    out[0] = U[0];
  };
  s.B = [](std::span<const double> U, std::span<double> out) { out[0] = U[0]; };
  s.dB = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  s.eta = [](std::span<const double> U) { return 0.5 * U[0] * U[0]; };
  s.deta = [](std::span<const double> U, std::span<double> out) {
    out[0] = U[0];
  };
  s.q = [](std::span<const double> U, std::span<double> out) {
    out[0] = U[0] * U[0] * U[0] / 3.0;
  };
  s.dq = [](std::span<const double> U, std::span<double> out) {
    out[0] = U[0] * U[0];
  };
  return s;
}

// ---------------------------------------------------------------------------
// Incompressible Euler:  states (v_1..v_k, p); rows (v_1..v_k, div v).
//   A = (v, 0),   F_{v_i,j} = v_i v_j + p delta_ij,   F_{divv,j} = v_j,
//   B = (v, p - |v|^2/2),   eta = |v|^2/2,   q_j = (|v|^2/2 + p) v_j.
// The divergence row is affine, so its mollification commutator vanishes.
// ---------------------------------------------------------------------------

SystemSpec make_incomp_euler(int k) {
  SystemSpec s;
  s.name = "incomp-euler";
  s.k = k;
  s.n_states = k + 1;
  s.n_rows = k + 1;
  for (int i = 0; i < k; ++i) s.state_names.push_back("v" + axis_suffix(k, i));
  s.state_names.push_back("p");
  s.row_names = s.state_names;
  s.row_names.back() = "divv";
  default_bounds(s);
  pressure_bounds(s, k);
  s.affine_rows = {k};

  const int n = s.n_states, nr = s.n_rows;
  s.A = [k, nr](std::span<const double> U, std::span<double> out) {
    for (int i = 0; i < k; ++i) out[i] = U[i];
    out[nr - 1] = 0.0;
  };
  s.dA = [k, n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < k; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr](std::span<const double> U, std::span<double> out) {
    const double p = U[k];
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        out[j * nr + i] = U[i] * U[j] + (i == j ? p : 0.0);
      }
      out[j * nr + (nr - 1)] = U[j];
    }
  };
  s.dF = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        double* row = &out[(j * nr + i) * n];
        row[i] += U[j];
        row[j] += U[i];
        if (i == j) row[k] = 1.0;
      }
      out[(j * nr + (nr - 1)) * n + j] = 1.0;
    }
  };
  s.B = [k, nr](std::span<const double> U, std::span<double> out) {
    double v2 = 0.0;
    for (int i = 0; i < k; ++i) {
      out[i] = U[i];
      v2 += U[i] * U[i];
    }
    out[nr - 1] = U[k] - 0.5 * v2;
  };
  s.dB = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < k; ++i) out[i * n + i] = 1.0;
    double* last = &out[(nr - 1) * n];
    for (int i = 0; i < k; ++i) last[i] = -U[i];
    last[k] = 1.0;
  };
  s.eta = [k](std::span<const double> U) {
    double v2 = 0.0;
    for (int i = 0; i < k; ++i) v2 += U[i] * U[i];
    return 0.5 * v2;
  };
  s.deta = [k](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < k; ++i) out[i] = U[i];
  };
  s.q = [k](std::span<const double> U, std::span<double> out) {
    double v2 = 0.0;
    for (int i = 0; i < k; ++i) v2 += U[i] * U[i];
    const double e = 0.5 * v2 + U[k];
    for (int j = 0; j < k; ++j) out[j] = e * U[j];
  };
  s.dq = [k, n](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    double v2 = 0.0;
    for (int i = 0; i < k; ++i) v2 += U[i] * U[i];
    const double e = 0.5 * v2 + U[k];
    for (int j = 0; j < k; ++j) {
      double* row = &out[j * n];
      for (int l = 0; l < k; ++l) row[l] = U[l] * U[j];
      row[j] += e;
      row[k] = U[j];
    }
  };
  return s;
}

// ---------------------------------------------------------------------------
// Inhomogeneous incompressible Euler: states (rho, m_1..m_k, p).
//   A = (rho, m, 0),  F_rho = m,  F_{m_i,j} = m_i m_j / rho + p delta_ij,
//   F_{divv,j} = m_j / rho,
//   B = (-|m|^2/(2 rho^2), m/rho, p),  eta = |m|^2/(2 rho),
//   q_j = (eta + p) m_j / rho.
// The continuity row is affine in the state.
// ---------------------------------------------------------------------------

SystemSpec make_inhom_incomp_euler(int k) {
  SystemSpec s;
  s.name = "inhom-incomp-euler";
  s.k = k;
  s.n_states = k + 2;
  s.n_rows = k + 2;
  s.state_names.push_back("rho");
  for (int i = 0; i < k; ++i) s.state_names.push_back("m" + axis_suffix(k, i));
  s.state_names.push_back("p");
  s.row_names = s.state_names;
  s.row_names.back() = "divv";
  default_bounds(s);
  density_bounds(s, 0);
  pressure_bounds(s, k + 1);
  s.affine_rows = {0};

  const int n = s.n_states, nr = s.n_rows;
  s.A = [k, nr](std::span<const double> U, std::span<double> out) {
    out[0] = U[0];
    for (int i = 0; i < k; ++i) out[1 + i] = U[1 + i];
    out[nr - 1] = 0.0;
  };
  s.dA = [k, n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 1 + k; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    const double p = U[1 + k];
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      out[j * nr + 0] = mj;
      for (int i = 0; i < k; ++i) {
        out[j * nr + 1 + i] = U[1 + i] * mj / rho + (i == j ? p : 0.0);
      }
      out[j * nr + (nr - 1)] = mj / rho;
    }
  };
  s.dF = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      out[(j * nr + 0) * n + 1 + j] = 1.0;
      for (int i = 0; i < k; ++i) {
        const double mi = U[1 + i];
        double* row = &out[(j * nr + 1 + i) * n];
        row[0] = -mi * mj / (rho * rho);
        row[1 + i] += mj / rho;
        row[1 + j] += mi / rho;
        if (i == j) row[1 + k] = 1.0;
      }
      double* drow = &out[(j * nr + (nr - 1)) * n];
      drow[0] = -mj / (rho * rho);
      drow[1 + j] = 1.0 / rho;
    }
  };
  s.B = [k, nr](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      m2 += U[1 + i] * U[1 + i];
      out[1 + i] = U[1 + i] / rho;
    }
    out[0] = -0.5 * m2 / (rho * rho);
    out[nr - 1] = U[1 + k];
  };
  s.dB = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      m2 += mi * mi;
      out[0 * n + 1 + i] = -mi / (rho * rho);
      out[(1 + i) * n + 0] = -mi / (rho * rho);
      out[(1 + i) * n + 1 + i] = 1.0 / rho;
    }
    out[0] = m2 / (rho * rho * rho);
    out[(nr - 1) * n + 1 + k] = 1.0;
  };
  s.eta = [k](std::span<const double> U) {
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    return 0.5 * m2 / U[0];
  };
  s.deta = [k](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      m2 += U[1 + i] * U[1 + i];
      out[1 + i] = U[1 + i] / rho;
    }
    out[0] = -0.5 * m2 / (rho * rho);
  };
  s.q = [k](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    const double e = 0.5 * m2 / rho + U[1 + k];
    for (int j = 0; j < k; ++j) out[j] = e * U[1 + j] / rho;
  };
  s.dq = [k, n](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    const double p = U[1 + k];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    const double e = 0.5 * m2 / rho + p;
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      double* row = &out[j * n];
      row[0] = -m2 * mj / (rho * rho * rho) - p * mj / (rho * rho);
      for (int l = 0; l < k; ++l) row[1 + l] = U[1 + l] * mj / (rho * rho);
      row[1 + j] += e / rho;
      row[1 + k] = mj / rho;
    }
  };
  return s;
}

// ---------------------------------------------------------------------------
// Isentropic compressible Euler: states (rho, m_1..m_k), p = p(rho).
//   F_rho = m,  F_{m_i,j} = m_i m_j / rho + p(rho) delta_ij,
//   B = (P'(rho) - |m|^2/(2 rho^2), m/rho),
//   eta = |m|^2/(2 rho) + P(rho),   q_j = (eta + p) m_j / rho.
// ---------------------------------------------------------------------------

SystemSpec make_comp_euler(int k) {
  SystemSpec s;
  s.name = "comp-euler";
  s.k = k;
  s.n_states = k + 1;
  s.n_rows = k + 1;
  s.state_names.push_back("rho");
  for (int i = 0; i < k; ++i) s.state_names.push_back("m" + axis_suffix(k, i));
  s.row_names = s.state_names;
  default_bounds(s);
  density_bounds(s, 0);
  s.pressure = PressureLaw{};
  s.affine_rows = {0};

  const int n = s.n_states, nr = s.n_rows;
  const PressureLaw pl = *s.pressure;
  s.A = [](std::span<const double> U, std::span<double> out) {
    std::copy(U.begin(), U.end(), out.begin());
  };
  s.dA = [n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < n; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    const double p = pl.p(rho);
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      out[j * nr + 0] = mj;
      for (int i = 0; i < k; ++i) {
        out[j * nr + 1 + i] = U[1 + i] * mj / rho + (i == j ? p : 0.0);
      }
    }
  };
  s.dF = [k, n, nr, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    const double dp = pl.dp(rho);
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      out[(j * nr + 0) * n + 1 + j] = 1.0;
      for (int i = 0; i < k; ++i) {
        const double mi = U[1 + i];
        double* row = &out[(j * nr + 1 + i) * n];
        row[0] = -mi * mj / (rho * rho) + (i == j ? dp : 0.0);
        row[1 + i] += mj / rho;
        row[1 + j] += mi / rho;
      }
    }
  };
  s.B = [k, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      m2 += U[1 + i] * U[1 + i];
      out[1 + i] = U[1 + i] / rho;
    }
    out[0] = pl.dP(rho) - 0.5 * m2 / (rho * rho);
  };
  s.dB = [k, n, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      m2 += mi * mi;
      out[0 * n + 1 + i] = -mi / (rho * rho);
      out[(1 + i) * n + 0] = -mi / (rho * rho);
      out[(1 + i) * n + 1 + i] = 1.0 / rho;
    }
    out[0] = pl.ddP(rho) + m2 / (rho * rho * rho);
  };
  s.eta = [k, pl](std::span<const double> U) {
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    return 0.5 * m2 / U[0] + pl.P(U[0]);
  };
  s.deta = [k, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      m2 += U[1 + i] * U[1 + i];
      out[1 + i] = U[1 + i] / rho;
    }
    out[0] = pl.dP(rho) - 0.5 * m2 / (rho * rho);
  };
  s.q = [k, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    const double e = 0.5 * m2 / rho + pl.P(rho) + pl.p(rho);
    for (int j = 0; j < k; ++j) out[j] = e * U[1 + j] / rho;
  };
  s.dq = [k, n, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) m2 += U[1 + i] * U[1 + i];
    const double e = 0.5 * m2 / rho + pl.P(rho) + pl.p(rho);
    const double de_rho =
        (-0.5 * m2 / (rho * rho) + pl.dP(rho) + pl.dp(rho)) / rho -
        e / (rho * rho);
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      double* row = &out[j * n];
      row[0] = de_rho * mj;
      for (int l = 0; l < k; ++l) row[1 + l] = U[1 + l] * mj / (rho * rho);
      row[1 + j] += e / rho;
    }
  };
  return s;
}

// ---------------------------------------------------------------------------
// Hyperelastic flow: states (v_1..v_k, Fd_11..Fd_kk), deformation gradient
// stored row-major.  With stored energy G(Fd) = sum_ij g(Fd_ij),
// g(f) = f^2/2 + c log(1 + f^2) and Piola stress S_ij = g'(Fd_ij):
//   F_{v_i,j} = -S_ij,  F_{Fd_ab,j} = -v_a delta_bj,
//   B = (v, S),  eta = |v|^2/2 + G(Fd),  q_j = -sum_i v_i S_ij.
// Every deformation-gradient row is affine in the state.
// ---------------------------------------------------------------------------

constexpr double kElastoC = 0.1;

double elasto_sigma(double f) { return f + 2.0 * kElastoC * f / (1.0 + f * f); }

double elasto_dsigma(double f) {
  const double d = 1.0 + f * f;
  return 1.0 + 2.0 * kElastoC * (1.0 - f * f) / (d * d);
}

double elasto_g(double f) {
  return 0.5 * f * f + kElastoC * std::log(1.0 + f * f);
}

SystemSpec make_elasto(int k) {
  SystemSpec s;
  s.name = "elasto";
  s.k = k;
  s.n_states = k + k * k;
  s.n_rows = k + k * k;
  for (int i = 0; i < k; ++i) s.state_names.push_back("v" + axis_suffix(k, i));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      s.state_names.push_back("F" + std::to_string(a + 1) +
                              std::to_string(b + 1));
    }
  }
  s.row_names = s.state_names;
  default_bounds(s);
  for (int a = 0; a < k * k; ++a) s.affine_rows.push_back(k + a);

  const int n = s.n_states, nr = s.n_rows;
  // Deformation-gradient entry (a,b) lives at state slot k + a*k + b.
  auto fd = [k](std::span<const double> U, int a, int b) {
    return U[k + a * k + b];
  };
  s.A = [](std::span<const double> U, std::span<double> out) {
    std::copy(U.begin(), U.end(), out.begin());
  };
  s.dA = [n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < n; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr, fd](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        out[j * nr + i] = -elasto_sigma(fd(U, i, j));
      }
      for (int a = 0; a < k; ++a) {
        out[j * nr + k + a * k + j] = -U[a];
      }
    }
  };
  s.dF = [k, n, nr, fd](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        out[(j * nr + i) * n + k + i * k + j] = -elasto_dsigma(fd(U, i, j));
      }
      for (int a = 0; a < k; ++a) {
        out[(j * nr + k + a * k + j) * n + a] = -1.0;
      }
    }
  };
  s.B = [k, fd](std::span<const double> U, std::span<double> out) {
    for (int i = 0; i < k; ++i) out[i] = U[i];
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        out[k + a * k + b] = elasto_sigma(fd(U, a, b));
      }
    }
  };
  s.dB = [k, n, fd](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < k; ++i) out[i * n + i] = 1.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const int slot = k + a * k + b;
        out[slot * n + slot] = elasto_dsigma(fd(U, a, b));
      }
    }
  };
  s.eta = [k, fd](std::span<const double> U) {
    double e = 0.0;
    for (int i = 0; i < k; ++i) e += 0.5 * U[i] * U[i];
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) e += elasto_g(fd(U, a, b));
    }
    return e;
  };
  s.deta = [k, fd](std::span<const double> U, std::span<double> out) {
    for (int i = 0; i < k; ++i) out[i] = U[i];
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        out[k + a * k + b] = elasto_sigma(fd(U, a, b));
      }
    }
  };
  s.q = [k, fd](std::span<const double> U, std::span<double> out) {
    for (int j = 0; j < k; ++j) {
      double sum = 0.0;
      for (int i = 0; i < k; ++i) sum += U[i] * elasto_sigma(fd(U, i, j));
      out[j] = -sum;
    }
  };
  s.dq = [k, n, fd](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      double* row = &out[j * n];
      for (int i = 0; i < k; ++i) {
        row[i] = -elasto_sigma(fd(U, i, j));
        row[k + i * k + j] = -U[i] * elasto_dsigma(fd(U, i, j));
      }
    }
  };
  return s;
}

// ---------------------------------------------------------------------------
// Incompressible MHD: states (v, h, p); rows (v, h, div v, div h).
//   F_{v_i,j} = v_i v_j - h_i h_j + (p + |h|^2/2) delta_ij,
//   F_{h_i,j} = h_i v_j - v_i h_j,   F_{divv,j} = v_j,   F_{divh,j} = h_j,
//   B = (v, h, p - |v|^2/2, v.h),
//   eta = (|v|^2 + |h|^2)/2,
//   q_j = (|v|^2/2 + |h|^2 + p) v_j - (v.h) h_j.
// Both divergence rows are affine; the div h one carries multiplier v.h and
// is what closes the magnetic part of the flux identity.
// ---------------------------------------------------------------------------

SystemSpec make_incomp_mhd(int k) {
  SystemSpec s;
  s.name = "incomp-mhd";
  s.k = k;
  s.n_states = 2 * k + 1;
  s.n_rows = 2 * k + 2;
  for (int i = 0; i < k; ++i) s.state_names.push_back("v" + axis_suffix(k, i));
  for (int i = 0; i < k; ++i) s.state_names.push_back("h" + axis_suffix(k, i));
  s.state_names.push_back("p");
  s.row_names = s.state_names;
  s.row_names.back() = "divv";
  s.row_names.push_back("divh");
  default_bounds(s);
  pressure_bounds(s, 2 * k);
  s.affine_rows = {2 * k, 2 * k + 1};

  const int n = s.n_states, nr = s.n_rows;
  s.A = [k, nr](std::span<const double> U, std::span<double> out) {
    for (int i = 0; i < 2 * k; ++i) out[i] = U[i];
    out[nr - 2] = 0.0;
    out[nr - 1] = 0.0;
  };
  s.dA = [k, n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 2 * k; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr](std::span<const double> U, std::span<double> out) {
    double h2 = 0.0;
    for (int i = 0; i < k; ++i) h2 += U[k + i] * U[k + i];
    const double ptot = U[2 * k] + 0.5 * h2;
    for (int j = 0; j < k; ++j) {
      const double vj = U[j];
      const double hj = U[k + j];
      for (int i = 0; i < k; ++i) {
        const double vi = U[i];
        const double hi = U[k + i];
        out[j * nr + i] = vi * vj - hi * hj + (i == j ? ptot : 0.0);
        out[j * nr + k + i] = hi * vj - vi * hj;
      }
      out[j * nr + (nr - 2)] = vj;
      out[j * nr + (nr - 1)] = hj;
    }
  };
  s.dF = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      const double vj = U[j];
      const double hj = U[k + j];
      for (int i = 0; i < k; ++i) {
        const double vi = U[i];
        const double hi = U[k + i];
        double* rv = &out[(j * nr + i) * n];
        rv[i] += vj;
        rv[j] += vi;
        rv[k + i] += -hj;
        rv[k + j] += -hi;
        if (i == j) {
          rv[2 * k] += 1.0;
          for (int l = 0; l < k; ++l) rv[k + l] += U[k + l];
        }
        double* rh = &out[(j * nr + k + i) * n];
        rh[k + i] += vj;
        rh[j] += hi;
        rh[i] += -hj;
        rh[k + j] += -vi;
      }
      out[(j * nr + (nr - 2)) * n + j] = 1.0;
      out[(j * nr + (nr - 1)) * n + k + j] = 1.0;
    }
  };
  s.B = [k, nr](std::span<const double> U, std::span<double> out) {
    double v2 = 0.0, vh = 0.0;
    for (int i = 0; i < k; ++i) {
      out[i] = U[i];
      out[k + i] = U[k + i];
      v2 += U[i] * U[i];
      vh += U[i] * U[k + i];
    }
    out[nr - 2] = U[2 * k] - 0.5 * v2;
    out[nr - 1] = vh;
  };
  s.dB = [k, n, nr](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 2 * k; ++i) out[i * n + i] = 1.0;
    double* rdv = &out[(nr - 2) * n];
    for (int i = 0; i < k; ++i) rdv[i] = -U[i];
    rdv[2 * k] = 1.0;
    double* rdh = &out[(nr - 1) * n];
    for (int i = 0; i < k; ++i) {
      rdh[i] = U[k + i];
      rdh[k + i] = U[i];
    }
  };
  s.eta = [k](std::span<const double> U) {
    double e = 0.0;
    for (int i = 0; i < 2 * k; ++i) e += 0.5 * U[i] * U[i];
    return e;
  };
  s.deta = [k](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < 2 * k; ++i) out[i] = U[i];
  };
  s.q = [k](std::span<const double> U, std::span<double> out) {
    double v2 = 0.0, h2 = 0.0, vh = 0.0;
    for (int i = 0; i < k; ++i) {
      v2 += U[i] * U[i];
      h2 += U[k + i] * U[k + i];
      vh += U[i] * U[k + i];
    }
    const double e = 0.5 * v2 + h2 + U[2 * k];
    for (int j = 0; j < k; ++j) out[j] = e * U[j] - vh * U[k + j];
  };
  s.dq = [k, n](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    double v2 = 0.0, h2 = 0.0, vh = 0.0;
    for (int i = 0; i < k; ++i) {
      v2 += U[i] * U[i];
      h2 += U[k + i] * U[k + i];
      vh += U[i] * U[k + i];
    }
    const double e = 0.5 * v2 + h2 + U[2 * k];
    for (int j = 0; j < k; ++j) {
      const double vj = U[j];
      const double hj = U[k + j];
      double* row = &out[j * n];
      for (int l = 0; l < k; ++l) {
        row[l] = U[l] * vj - U[k + l] * hj;
        row[k + l] = 2.0 * U[k + l] * vj - U[l] * hj;
      }
      row[j] += e;
      row[k + j] += -vh;
      row[2 * k] = vj;
    }
  };
  return s;
}

// ---------------------------------------------------------------------------
// Isentropic compressible MHD: states (rho, m, h); rows (rho, m, h, div h).
//   F_rho = m,
//   F_{m_i,j} = m_i m_j / rho + (p + |h|^2/2) delta_ij - h_i h_j,
//   F_{h_i,j} = (h_i m_j - m_i h_j) / rho,   F_{divh,j} = h_j,
//   B = (P' - |m|^2/(2 rho^2), m/rho, h, (m.h)/rho),
//   eta = |m|^2/(2 rho) + P + |h|^2/2,
//   q_j = (|m|^2/(2 rho) + P + p + |h|^2) m_j/rho - ((m.h)/rho) h_j.
// ---------------------------------------------------------------------------

SystemSpec make_comp_mhd(int k) {
  SystemSpec s;
  s.name = "comp-mhd";
  s.k = k;
  s.n_states = 1 + 2 * k;
  s.n_rows = 2 + 2 * k;
  s.state_names.push_back("rho");
  for (int i = 0; i < k; ++i) s.state_names.push_back("m" + axis_suffix(k, i));
  for (int i = 0; i < k; ++i) s.state_names.push_back("h" + axis_suffix(k, i));
  s.row_names = s.state_names;
  s.row_names.push_back("divh");
  default_bounds(s);
  density_bounds(s, 0);
  s.pressure = PressureLaw{};
  s.affine_rows = {0, 1 + 2 * k};

  const int n = s.n_states, nr = s.n_rows;
  const PressureLaw pl = *s.pressure;
  s.A = [n, nr](std::span<const double> U, std::span<double> out) {
    for (int i = 0; i < n; ++i) out[i] = U[i];
    out[nr - 1] = 0.0;
  };
  s.dA = [n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < n; ++i) out[i * n + i] = 1.0;
  };
  s.F = [k, nr, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double h2 = 0.0;
    for (int i = 0; i < k; ++i) h2 += U[1 + k + i] * U[1 + k + i];
    const double ptot = pl.p(rho) + 0.5 * h2;
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      const double hj = U[1 + k + j];
      out[j * nr + 0] = mj;
      for (int i = 0; i < k; ++i) {
        const double mi = U[1 + i];
        const double hi = U[1 + k + i];
        out[j * nr + 1 + i] = mi * mj / rho + (i == j ? ptot : 0.0) - hi * hj;
        out[j * nr + 1 + k + i] = (hi * mj - mi * hj) / rho;
      }
      out[j * nr + (nr - 1)] = hj;
    }
  };
  s.dF = [k, n, nr, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    const double dp = pl.dp(rho);
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      const double hj = U[1 + k + j];
      out[(j * nr + 0) * n + 1 + j] = 1.0;
      for (int i = 0; i < k; ++i) {
        const double mi = U[1 + i];
        const double hi = U[1 + k + i];
        double* rm = &out[(j * nr + 1 + i) * n];
        rm[0] = -mi * mj / (rho * rho) + (i == j ? dp : 0.0);
        rm[1 + i] += mj / rho;
        rm[1 + j] += mi / rho;
        rm[1 + k + i] += -hj;
        rm[1 + k + j] += -hi;
        if (i == j) {
          for (int l = 0; l < k; ++l) rm[1 + k + l] += U[1 + k + l];
        }
        double* rh = &out[(j * nr + 1 + k + i) * n];
        rh[0] = -(hi * mj - mi * hj) / (rho * rho);
        rh[1 + k + i] += mj / rho;
        rh[1 + j] += hi / rho;
        rh[1 + i] += -hj / rho;
        rh[1 + k + j] += -mi / rho;
      }
      out[(j * nr + (nr - 1)) * n + 1 + k + j] = 1.0;
    }
  };
  s.B = [k, nr, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0, mh = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      const double hi = U[1 + k + i];
      m2 += mi * mi;
      mh += mi * hi;
      out[1 + i] = mi / rho;
      out[1 + k + i] = hi;
    }
    out[0] = pl.dP(rho) - 0.5 * m2 / (rho * rho);
    out[nr - 1] = mh / rho;
  };
  s.dB = [k, n, nr, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0, mh = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      const double hi = U[1 + k + i];
      m2 += mi * mi;
      mh += mi * hi;
      out[0 * n + 1 + i] = -mi / (rho * rho);
      out[(1 + i) * n + 0] = -mi / (rho * rho);
      out[(1 + i) * n + 1 + i] = 1.0 / rho;
      out[(1 + k + i) * n + 1 + k + i] = 1.0;
    }
    out[0] = pl.ddP(rho) + m2 / (rho * rho * rho);
    double* rdh = &out[(nr - 1) * n];
    rdh[0] = -mh / (rho * rho);
    for (int i = 0; i < k; ++i) {
      rdh[1 + i] = U[1 + k + i] / rho;
      rdh[1 + k + i] = U[1 + i] / rho;
    }
  };
  s.eta = [k, pl](std::span<const double> U) {
    const double rho = U[0];
    double m2 = 0.0, h2 = 0.0;
    for (int i = 0; i < k; ++i) {
      m2 += U[1 + i] * U[1 + i];
      h2 += U[1 + k + i] * U[1 + k + i];
    }
    return 0.5 * m2 / rho + pl.P(rho) + 0.5 * h2;
  };
  s.deta = [k, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      m2 += mi * mi;
      out[1 + i] = mi / rho;
      out[1 + k + i] = U[1 + k + i];
    }
    out[0] = pl.dP(rho) - 0.5 * m2 / (rho * rho);
  };
  s.q = [k, pl](std::span<const double> U, std::span<double> out) {
    const double rho = U[0];
    double m2 = 0.0, h2 = 0.0, mh = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      const double hi = U[1 + k + i];
      m2 += mi * mi;
      h2 += hi * hi;
      mh += mi * hi;
    }
    const double e = 0.5 * m2 / rho + pl.P(rho) + pl.p(rho) + h2;
    for (int j = 0; j < k; ++j) {
      out[j] = e * U[1 + j] / rho - (mh / rho) * U[1 + k + j];
    }
  };
  s.dq = [k, n, pl](std::span<const double> U, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double rho = U[0];
    double m2 = 0.0, h2 = 0.0, mh = 0.0;
    for (int i = 0; i < k; ++i) {
      const double mi = U[1 + i];
      const double hi = U[1 + k + i];
      m2 += mi * mi;
      h2 += hi * hi;
      mh += mi * hi;
    }
    const double e = 0.5 * m2 / rho + pl.P(rho) + pl.p(rho) + h2;
    const double de_rho =
        (-0.5 * m2 / (rho * rho) + pl.dP(rho) + pl.dp(rho)) / rho -
        e / (rho * rho);
    for (int j = 0; j < k; ++j) {
      const double mj = U[1 + j];
      const double hj = U[1 + k + j];
      double* row = &out[j * n];
      row[0] = de_rho * mj + mh * hj / (rho * rho);
      for (int l = 0; l < k; ++l) {
        row[1 + l] = U[1 + l] * mj / (rho * rho) - U[1 + k + l] * hj / rho;
        row[1 + k + l] = 2.0 * U[1 + k + l] * mj / rho - U[1 + l] * hj / rho;
      }
      row[1 + j] += e / rho;
      row[1 + k + j] += -mh / rho;
    }
  };
  return s;
}

void check_dim(const std::string& name, int k, int lo, int hi) {
  if (k < lo || k > hi) {
    throw error("system '" + name + "' supports spatial dimension " +
                std::to_string(lo) + ".." + std::to_string(hi) + ", got " +
                std::to_string(k));
  }
}

} // namespace

std::vector<std::string> registry_names() {
  return {"burgers",    "incomp-euler", "inhom-incomp-euler", "comp-euler",
          "elasto",     "incomp-mhd",   "comp-mhd"};
}

SystemSpec make_system(const std::string& name, int k) {
  if (name == "burgers") {
    if (k == 0) k = 1;
    check_dim(name, k, 1, 1);
    return make_burgers();
  }
  if (name == "incomp-euler") {
    if (k == 0) k = 3;
    check_dim(name, k, 1, 3);
    return make_incomp_euler(k);
  }
  if (name == "inhom-incomp-euler") {
    if (k == 0) k = 3;
    check_dim(name, k, 1, 3);
    return make_inhom_incomp_euler(k);
  }
  if (name == "comp-euler") {
    if (k == 0) k = 3;
    check_dim(name, k, 1, 3);
    return make_comp_euler(k);
  }
  if (name == "elasto") {
    if (k == 0) k = 3;
    check_dim(name, k, 1, 3);
    return make_elasto(k);
  }
  if (name == "incomp-mhd") {
    if (k == 0) k = 3;
    check_dim(name, k, 2, 3);
    return make_incomp_mhd(k);
  }
  if (name == "comp-mhd") {
    if (k == 0) k = 3;
    check_dim(name, k, 2, 3);
    return make_comp_mhd(k);
  }
  std::string all;
  for (const auto& n : registry_names()) {
    if (!all.empty()) all += ", ";
    all += n;
  }
  throw error("unknown system '" + name + "' (try: " + all + ")");
}

// ---------------------------------------------------------------------------
// Pointwise evaluation over a field
// ---------------------------------------------------------------------------

namespace {

Field evaluate_core(const SystemSpec& sys, const Field& state, Eval which,
                    const IndexBox& box) {
  if (state.n_components != sys.n_states) {
    throw error("state field has " + std::to_string(state.n_components) +
                " components but system '" + sys.name + "' expects " +
                std::to_string(sys.n_states));
  }
  const int n = sys.n_states, nr = sys.n_rows, k = sys.k;

  int n_out = 0;
  std::vector<std::string> names;
  switch (which) {
    case Eval::A:
      n_out = nr;
      for (int r = 0; r < nr; ++r) names.push_back("A_" + sys.row_names[r]);
      break;
    case Eval::F:
      n_out = k * nr;
      for (int j = 0; j < k; ++j) {
        for (int r = 0; r < nr; ++r) {
          names.push_back("F" + std::to_string(j + 1) + "_" + sys.row_names[r]);
        }
      }
      break;
    case Eval::B:
      n_out = nr;
      for (int r = 0; r < nr; ++r) names.push_back("B_" + sys.row_names[r]);
      break;
    case Eval::Eta:
      n_out = 1;
      names.push_back("eta");
      break;
    case Eval::Q:
      n_out = k;
      for (int j = 0; j < k; ++j) names.push_back("q" + std::to_string(j + 1));
      break;
    case Eval::G:
      // Spatial flux columns first, then the density column, so that column c
      // pairs with gradient slot c of a spatial-then-time test gradient.
      n_out = (k + 1) * nr;
      for (int j = 0; j < k; ++j) {
        for (int r = 0; r < nr; ++r) {
          names.push_back("F" + std::to_string(j + 1) + "_" + sys.row_names[r]);
        }
      }
      for (int r = 0; r < nr; ++r) names.push_back("A_" + sys.row_names[r]);
      break;
  }

  Field out = make_field(state.grid, n_out, names);
  const std::size_t points = state.points();
  const BoxIndexer bi(state.grid, box);
  par::for_each(bi.total, [&](std::size_t r) {
    const std::size_t idx = bi.flat_at(r);
    std::vector<double> U(n);
    for (int s = 0; s < n; ++s) U[s] = state.data[s * points + idx];
    sys.require_valid(U, idx);
    std::vector<double> val(n_out);
    switch (which) {
      case Eval::A: sys.A(U, val); break;
      case Eval::F: sys.F(U, val); break;
      case Eval::B: sys.B(U, val); break;
      case Eval::Eta: val[0] = sys.eta(U); break;
      case Eval::Q: sys.q(U, val); break;
      case Eval::G:
        sys.F(U, std::span<double>(val.data(), k * nr));
        sys.A(U, std::span<double>(val.data() + k * nr, nr));
        break;
    }
    for (int c = 0; c < n_out; ++c) out.data[c * points + idx] = val[c];
  });
  return out;
}

} // namespace

Field evaluate(const SystemSpec& sys, const Field& state, Eval which) {
  return evaluate_core(sys, state, which, full_box(state.grid));
}

InteriorField evaluate(const SystemSpec& sys, const InteriorField& state,
                       Eval which) {
  return {evaluate_core(sys, state.field, which, state.box), state.box};
}

// ---------------------------------------------------------------------------
// Compatibility check: B . dA = deta and B . dF_j = dq_j at random states,
// plus a central-difference cross-check of every analytic Jacobian.
// ---------------------------------------------------------------------------

namespace {

// Central difference of a vector-valued callable in state direction s.
void central_diff(const SystemSpec::VecFn& fn, std::vector<double>& U, int s,
                  double h, std::span<double> plus, std::span<double> minus,
                  std::span<double> out) {
  const double saved = U[s];
  U[s] = saved + h;
  fn(U, plus);
  U[s] = saved - h;
  fn(U, minus);
  U[s] = saved;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (plus[i] - minus[i]) / (2.0 * h);
  }
}

double rel_mismatch(double a, double fdval) {
  return std::abs(a - fdval) / std::max({1.0, std::abs(a), std::abs(fdval)});
}

} // namespace

CompatReport check_compatibility(const SystemSpec& sys, int n_samples,
                                 std::uint64_t seed) {
  const int n = sys.n_states, nr = sys.n_rows, k = sys.k;
  std::mt19937_64 eng(seed);

  std::vector<double> U(n), B(nr), dA(nr * n), dB(nr * n), deta(n);
  std::vector<double> dF(k * nr * n), dq(k * n), width(n);
  for (int s = 0; s < n; ++s) {
    width[s] = sys.sample_hi[s] - sys.sample_lo[s];
  }

  CompatReport rep;
  rep.samples = n_samples;

  // Scratch for finite differences, sized for the largest callable output.
  const std::size_t max_out = static_cast<std::size_t>(k * nr);
  std::vector<double> fd(max_out), plus(max_out), minus(max_out);

  for (int sample = 0; sample < n_samples; ++sample) {
    // Sample slightly inside the box so difference stencils stay admissible.
    for (int s = 0; s < n; ++s) {
      const double pad = 1e-3 * width[s];
      U[s] = sys.sample_lo[s] + pad + uniform01(eng) * (width[s] - 2.0 * pad);
    }

    sys.B(U, B);
    sys.dA(U, dA);
    sys.dB(U, dB);
    sys.deta(U, deta);
    sys.dF(U, dF);
    sys.dq(U, dq);

    // Closure of the entropy gradient: deta_s = sum_r B_r dA_{r,s}.
    for (int s = 0; s < n; ++s) {
      double sum = 0.0;
      for (int r = 0; r < nr; ++r) sum += B[r] * dA[r * n + s];
      rep.max_eta_residual =
          std::max(rep.max_eta_residual, std::abs(deta[s] - sum));
    }
    // Closure of each entropy flux column: dq_{j,s} = sum_r B_r dF_{j,r,s}.
    for (int j = 0; j < k; ++j) {
      for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (int r = 0; r < nr; ++r) sum += B[r] * dF[(j * nr + r) * n + s];
        rep.max_q_residual =
            std::max(rep.max_q_residual, std::abs(dq[j * n + s] - sum));
      }
    }

    // Cross-check every analytic Jacobian column against central differences.
    for (int s = 0; s < n; ++s) {
      const double h = 1e-5 * width[s];
      auto check_cols = [&](const SystemSpec::VecFn& fn,
                            const std::vector<double>& jac, int rows) {
        central_diff(fn, U, s, h, std::span<double>(plus.data(), rows),
                     std::span<double>(minus.data(), rows),
                     std::span<double>(fd.data(), rows));
        for (int r = 0; r < rows; ++r) {
          rep.max_fd_mismatch =
              std::max(rep.max_fd_mismatch, rel_mismatch(jac[r * n + s], fd[r]));
        }
      };
      check_cols(sys.A, dA, nr);
      check_cols(sys.B, dB, nr);
      check_cols(sys.F, dF, k * nr);
      check_cols(sys.q, dq, k);
      {
        const double saved = U[s];
        U[s] = saved + h;
        const double ep = sys.eta(U);
        U[s] = saved - h;
        const double em = sys.eta(U);
        U[s] = saved;
        rep.max_fd_mismatch = std::max(
            rep.max_fd_mismatch, rel_mismatch(deta[s], (ep - em) / (2.0 * h)));
      }
    }
  }
  return rep;
}

double affine_rows_second_difference(const SystemSpec& sys, int n_samples,
                                     std::uint64_t seed) {
  const int n = sys.n_states, nr = sys.n_rows, k = sys.k;
  std::mt19937_64 eng(seed);

  std::vector<double> U(n), width(n);
  for (int s = 0; s < n; ++s) {
    width[s] = sys.sample_hi[s] - sys.sample_lo[s];
  }
  std::vector<double> fc(k * nr), fp(k * nr), fm(k * nr);
  std::vector<double> ac(nr), ap(nr), am(nr);

  double worst = 0.0;
  for (int sample = 0; sample < n_samples; ++sample) {
    // Sample the middle half of the box so U +/- delta stays admissible.
    for (int s = 0; s < n; ++s) {
      U[s] = sys.sample_lo[s] + width[s] * (0.25 + 0.5 * uniform01(eng));
    }
    for (int s = 0; s < n; ++s) {
      const double delta = 0.2 * width[s];
      const double saved = U[s];
      sys.F(U, fc);
      sys.A(U, ac);
      U[s] = saved + delta;
      sys.F(U, fp);
      sys.A(U, ap);
      U[s] = saved - delta;
      sys.F(U, fm);
      sys.A(U, am);
      U[s] = saved;
      for (int row : sys.affine_rows) {
        for (int j = 0; j < k; ++j) {
          const int idx = j * nr + row;
          worst = std::max(worst, std::abs(fp[idx] - 2.0 * fc[idx] + fm[idx]));
        }
        worst = std::max(worst, std::abs(ap[row] - 2.0 * ac[row] + am[row]));
      }
    }
  }
  return worst;
}

} // namespace cld

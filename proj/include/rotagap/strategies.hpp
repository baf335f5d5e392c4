#ifndef ROTAGAP_STRATEGIES_HPP
#define ROTAGAP_STRATEGIES_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rotagap/affinity.hpp"
#include "rotagap/domain.hpp"
#include "rotagap/error.hpp"
#include "rotagap/matrix.hpp"

namespace rotagap {

enum class StrategyKind { FOP, FOA, OS, PC, WPP };

/// How profits and affinities are combined into the cycle's values. Fixed for
/// a whole run.
struct StrategyConfig {
  StrategyKind kind = StrategyKind::FOP;
  std::optional<double> gamma;  // OS threshold
  double alpha = 1.0;           // PC profit exponent
  double beta = 1.0;            // PC affinity exponent

  static StrategyConfig fop() { return {StrategyKind::FOP, {}, 1, 1}; }
  static StrategyConfig foa() { return {StrategyKind::FOA, {}, 1, 1}; }
  static StrategyConfig os(double gamma) { return {StrategyKind::OS, gamma, 1, 1}; }
  static StrategyConfig pc(double alpha = 1, double beta = 1) {
    return {StrategyKind::PC, {}, alpha, beta};
  }
  static StrategyConfig wpp() { return {StrategyKind::WPP, {}, 1, 1}; }

  void validate() const {
    if (kind == StrategyKind::OS) {
      if (!gamma) throw ConfigError("strategy os requires gamma");
      if (!(*gamma > 0) || !std::isfinite(*gamma))
        throw ConfigError("strategy os: gamma must be positive");
    } else if (gamma) {
      throw ConfigError("gamma is only valid for strategy os");
    }
    if (!(alpha >= 0) || !(beta >= 0) || !std::isfinite(alpha) ||
        !std::isfinite(beta))
      throw ConfigError("strategy exponents must be finite and >= 0");
  }

  bool operator==(const StrategyConfig&) const = default;
};

inline std::string kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::FOP: return "fop";
    case StrategyKind::FOA: return "foa";
    case StrategyKind::OS: return "os";
    case StrategyKind::PC: return "pc";
    case StrategyKind::WPP: return "wpp";
  }
  return "?";
}

inline StrategyKind parse_kind(std::string_view s) {
  if (s == "fop") return StrategyKind::FOP;
  if (s == "foa") return StrategyKind::FOA;
  if (s == "os") return StrategyKind::OS;
  if (s == "pc") return StrategyKind::PC;
  if (s == "wpp") return StrategyKind::WPP;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

namespace detail {

inline std::string format_number(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline double parse_number(std::string_view s, std::string_view what) {
  double x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return x;
}

}  // namespace detail

/// Canonical label: fop, foa, os/10, pc, pc(alpha=2,beta=1), wpp.
inline std::string strategy_label(const StrategyConfig& c) {
  switch (c.kind) {
    case StrategyKind::OS:
      return "os/" + detail::format_number(c.gamma.value_or(0));
    case StrategyKind::PC:
      if (c.alpha == 1 && c.beta == 1) return "pc";
      return "pc(alpha=" + detail::format_number(c.alpha) +
             ",beta=" + detail::format_number(c.beta) + ")";
    default:
      return kind_name(c.kind);
  }
}

/// Parses "fop", "foa", "wpp", "os:<gamma>", "os/<gamma>", "pc",
/// "pc:alpha=<a>,beta=<b>" (either key optional).
inline StrategyConfig parse_strategy(std::string_view text) {
  auto sep = text.find_first_of(":/");
  std::string_view head = text.substr(0, sep);
  std::string_view rest =
      sep == std::string_view::npos ? std::string_view{} : text.substr(sep + 1);
  StrategyConfig c;
  c.kind = parse_kind(head);
  if (c.kind == StrategyKind::OS) {
    if (rest.empty()) throw ConfigError("strategy os requires gamma (os:<gamma>)");
    if (rest.substr(0, 6) == "gamma=") rest.remove_prefix(6);
    c.gamma = detail::parse_number(rest, "gamma");
  } else if (c.kind == StrategyKind::PC) {
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view kv = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      auto eq = kv.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("pc parameter must be key=value: '" + std::string(kv) + "'");
      auto key = kv.substr(0, eq);
      double v = detail::parse_number(kv.substr(eq + 1), key);
      if (key == "alpha") c.alpha = v;
      else if (key == "beta") c.beta = v;
      else throw ConfigError("unknown pc parameter '" + std::string(key) + "'");
    }
  } else if (!rest.empty()) {
    throw ConfigError("strategy " + std::string(head) + " takes no parameters");
  }
  c.validate();
  return c;
}

/// v_ij for one cycle. Non-zero only on available compatible pairs.
using ValueMatrix = Matrix<double>;

// The low-level combinators below take profit and affinity matrices that are
// already masked to the cycle: a pair is active iff its affinity is positive
// (compatible affinities are >= 1), and inactive pairs come out as 0.

inline ValueMatrix fop_values(const Matrix<double>& profits,
                              const Matrix<double>& affinities) {
  ValueMatrix v(profits.rows(), profits.cols(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j)
      if (affinities(i, j) > 0) v(i, j) = profits(i, j);
  return v;
}

inline ValueMatrix foa_values(const Matrix<double>& affinities) {
  return affinities;
}

/// Objective switch: profits while gamma > max AP, affinities otherwise.
inline ValueMatrix os_values(double gamma, const Matrix<double>& profits,
                             const Matrix<double>& affinities,
                             std::optional<double> max_ap) {
  if (!max_ap || gamma > *max_ap) return fop_values(profits, affinities);
  return foa_values(affinities);
}

inline ValueMatrix pc_values(double alpha, double beta,
                             const Matrix<double>& profits,
                             const Matrix<double>& affinities) {
  ValueMatrix v(profits.rows(), profits.cols(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j)
      if (affinities(i, j) > 0)
        v(i, j) = std::pow(profits(i, j), alpha) * std::pow(affinities(i, j), beta);
  return v;
}

/// Weighted partial profits. lambda_j = (c(c+1)/2) / sum_i a_ij over the
/// task's c active agents; both objectives are scaled by their global maxima.
/// lambda is not clamped, so negative values can arise; those are cut to 0.
inline ValueMatrix wpp_values(const Matrix<double>& profits,
                              const Matrix<double>& affinities,
                              std::span<const std::size_t> active_counts) {
  double max_p = 0, max_a = 0;
  bool any = false;
  for (std::size_t i = 0; i < profits.rows(); ++i)
    for (std::size_t j = 0; j < profits.cols(); ++j)
      if (affinities(i, j) > 0) {
        any = true;
        max_p = std::max(max_p, profits(i, j));
        max_a = std::max(max_a, affinities(i, j));
      }
  ValueMatrix v(profits.rows(), profits.cols(), 0.0);
  if (!any) return v;
  if (max_p <= 0) throw DegenerateInput("wpp: all available profits are zero");
  if (max_a <= 0) throw DegenerateInput("wpp: all available affinities are zero");

  for (std::size_t j = 0; j < profits.cols(); ++j) {
    const double c = static_cast<double>(active_counts[j]);
    if (c == 0) continue;
    double sum_a = 0;
    for (std::size_t i = 0; i < profits.rows(); ++i) sum_a += affinities(i, j);
    const double lambda = (c * (c + 1) / 2) / sum_a;
    for (std::size_t i = 0; i < profits.rows(); ++i) {
      if (affinities(i, j) <= 0) continue;
      const double x = lambda * (profits(i, j) / max_p) +
                       (1 - lambda) * (affinities(i, j) / max_a);
      v(i, j) = std::max(0.0, x);
    }
  }
  return v;
}

/// Profits and affinities masked to the available compatible pairs.
struct MaskedInputs {
  Matrix<double> profits;
  Matrix<double> affinities;
  std::vector<std::size_t> active_counts;
};

inline MaskedInputs mask_inputs(const Instance& inst,
                                const Matrix<std::int64_t>& profits,
                                const AffinityState& state,
                                const Availability& av) {
  const std::size_t m = inst.num_agents(), n = inst.num_tasks();
  MaskedInputs in{Matrix<double>(m, n, 0.0), Matrix<double>(m, n, 0.0),
                  std::vector<std::size_t>(n, 0)};
  for (std::size_t i = 0; i < m; ++i) {
    if (!av.agents[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!av.tasks[j] || !inst.compatible(i, j)) continue;
      in.profits(i, j) = static_cast<double>(profits(i, j));
      in.affinities(i, j) = static_cast<double>(state.affinities(i, j));
      ++in.active_counts[j];
    }
  }
  return in;
}

/// Values for one cycle. `profits` are the cycle's profits (they may differ
/// from the instance's when priorities are redrawn per cycle).
inline ValueMatrix compute_values(const StrategyConfig& config,
                                  const Instance& inst,
                                  const Matrix<std::int64_t>& profits,
                                  const AffinityState& state,
                                  const Availability& av) {
  config.validate();
  const MaskedInputs in = mask_inputs(inst, profits, state, av);
  ValueMatrix v;
  switch (config.kind) {
    case StrategyKind::FOP:
      v = fop_values(in.profits, in.affinities);
      break;
    case StrategyKind::FOA:
      v = foa_values(in.affinities);
      break;
    case StrategyKind::OS:
      v = os_values(*config.gamma, in.profits, in.affinities,
                    max_affinity_pressure(inst, state, av));
      break;
    case StrategyKind::PC:
      v = pc_values(config.alpha, config.beta, in.profits, in.affinities);
      break;
    case StrategyKind::WPP:
      v = wpp_values(in.profits, in.affinities, in.active_counts);
      break;
  }
  for (double x : v.data())
    if (!std::isfinite(x) || x < 0)
      throw DegenerateInput("strategy " + strategy_label(config) +
                            " produced a non-finite or negative value");
  return v;
}

inline ValueMatrix compute_values(const StrategyConfig& config,
                                  const Instance& inst,
                                  const AffinityState& state,
                                  const Availability& av) {
  return compute_values(config, inst, inst.profits(), state, av);
}

}  // namespace rotagap

#endif  // ROTAGAP_STRATEGIES_HPP

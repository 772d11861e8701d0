#pragma once

#include <time.h>

#include <chrono>
#include <utility>

#include "eegbench/core/error.hpp"

namespace eegbench::eval {

/// Carbon intensity is per kWh; CPU power is a fixed draw while busy.
struct MeterConfig {
  double cpu_power_w = 100.0;
  double carbon_intensity_g_per_kwh = 475.0;

  void validate() const {
    require(cpu_power_w >= 0 && carbon_intensity_g_per_kwh >= 0, ErrorCode::InvalidConfig,
            "meter power and carbon intensity must be >= 0");
  }
};

struct Measurement {
  double wall_s = 0;
  double cpu_s = 0;
  double energy_wh = 0;
  double co2_g = 0;
  bool cpu_available = true;  // false: thread CPU clock missing, energy reported as 0
};

inline double energy_wh(double cpu_s, const MeterConfig& cfg) { return cpu_s * cfg.cpu_power_w / 3600.0; }

inline double co2_g(double energy_wh, const MeterConfig& cfg) {
  return energy_wh * cfg.carbon_intensity_g_per_kwh / 1000.0;
}

inline Measurement measurement_from(double wall_s, double cpu_s, const MeterConfig& cfg, bool cpu_ok = true) {
  Measurement m;
  m.wall_s = wall_s;
  m.cpu_available = cpu_ok;
  m.cpu_s = cpu_ok ? cpu_s : 0.0;
  m.energy_wh = energy_wh(m.cpu_s, cfg);
  m.co2_g = co2_g(m.energy_wh, cfg);
  return m;
}

namespace detail {

// Per-thread CPU time so concurrent work units do not bill each other.
inline bool thread_cpu_seconds(double& out) {
  timespec ts{};
  if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) != 0) return false;
  out = double(ts.tv_sec) + 1e-9 * double(ts.tv_nsec);
  return true;
}

}  // namespace detail

/// Runs `block` and reports its wall time, CPU time, energy and emissions.
template <typename F>
Measurement meter(const MeterConfig& cfg, F&& block) {
  double c0 = 0, c1 = 0;
  const bool ok0 = detail::thread_cpu_seconds(c0);
  const auto w0 = std::chrono::steady_clock::now();
  std::forward<F>(block)();
  const auto w1 = std::chrono::steady_clock::now();
  const bool ok1 = detail::thread_cpu_seconds(c1);
  const double wall = std::chrono::duration<double>(w1 - w0).count();
  return measurement_from(wall, c1 - c0, cfg, ok0 && ok1 && c1 >= c0);
}

}  // namespace eegbench::eval

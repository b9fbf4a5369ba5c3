#pragma once

#include <filesystem>
#include <string>

#include "evfleet/domain.hpp"
#include "evfleet/solver.hpp"
#include "evfleet/synthetic.hpp"

namespace testutil {

inline std::filesystem::path data(const std::string& rel) {
  return std::filesystem::path(EVFLEET_TEST_DATA) / rel;
}

inline evfleet::TimeGrid day_grid(int td = 24) { return {1, td, 1.0, {365.0}}; }

inline evfleet::Instance tiny(evfleet::BlockSet blocks, int I = 1, int J = 1,
                              evfleet::Variant v = evfleet::Variant::SurplusAllowed) {
  return evfleet::default_instance(std::move(blocks), day_grid(), I, J, v);
}

// Bound-chain checks need tight gaps.
inline evfleet::SolverConfig exact() {
  evfleet::SolverConfig c;
  c.mip_rel_gap = 1e-9;
  c.time_limit_s = 120;
  return c;
}

struct ScopedEnv {
  std::string name;
  std::string old;
  bool had = false;
  ScopedEnv(std::string n, const std::string& value) : name(std::move(n)) {
    if (const char* p = std::getenv(name.c_str())) {
      had = true;
      old = p;
    }
    ::setenv(name.c_str(), value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (had) ::setenv(name.c_str(), old.c_str(), 1);
    else ::unsetenv(name.c_str());
  }
};

}  // namespace testutil

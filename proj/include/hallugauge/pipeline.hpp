#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hallugauge/core.hpp"
#include "hallugauge/provider.hpp"

namespace hg {

// Provider wiring shared by the subcommands. Exactly one source is active:
// live HTTP, a scripted mock, or fixture replay; recording wraps any of them.
struct ProviderSpec {
  std::string base_url;      // empty = offline
  std::string api_key;
  bool use_mock = false;
  std::string mock_script;   // path; implies mock
  std::string fixtures_dir;  // used by record / replay
  int retry_budget = 3;
  int retry_base_delay_ms = 500;
};

std::shared_ptr<Provider> make_provider(const ProviderSpec& spec, bool record,
                                        bool replay);

// Runs one subcommand; returns the process exit status. Never throws.
int dispatch(const std::vector<std::string>& args);

}  // namespace hg

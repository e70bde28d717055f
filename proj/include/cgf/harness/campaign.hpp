#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cgf/harness/generators.hpp"
#include "cgf/implication.hpp"

namespace cgf {

inline constexpr std::string_view kToolName = "framectl";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Envelope every trial instance is drawn from.
struct CampaignConfig {
  Index dim_min = 2;
  Index dim_max = 8;
  std::size_t max_blocks = 12;
  Index max_block_dim = 4;
  double conditioning = 1e4;
  // Contraction range for the neumann campaign.
  double q_min = 0.0;
  double q_max = 0.95;
  Tolerances tol;

  void validate() const;
};

struct TrialReport {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  InstanceSpec spec;
  std::string theorem;
  bool hypotheses_met = false;
  bool conclusion_verified = false;  // meaningful only when hypotheses_met
  std::vector<Margin> margins;
  std::vector<std::string> notes;
  std::chrono::duration<double> elapsed{0};  // kept out of serialized reports
};

struct MarginSummary {
  std::string name;
  std::size_t count = 0;
  double min = 0.0;
  double median = 0.0;
};

struct CampaignReport {
  std::string theorem;
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  CampaignConfig config;
  std::vector<TrialReport> records;  // ordered by trial index
  std::size_t hypotheses_met = 0;
  std::size_t verified = 0;
  std::size_t violations = 0;
  std::vector<MarginSummary> margins;  // over hypotheses-met trials, first-seen order
};

const std::vector<std::string>& registered_theorems();
bool is_registered(std::string_view theorem);

// Trial seed = derive_seed(master_seed, index). Throws UnknownTheorem.
TrialReport run_trial(std::string_view theorem, std::size_t index, std::uint64_t master_seed,
                      const CampaignConfig& config = {});

/// Runs `trials` independent trials on `threads` workers (0 = hardware
/// concurrency). Records depend only on (theorem, master_seed, index, config).
CampaignReport run_campaign(std::string_view theorem, std::size_t trials,
                            std::uint64_t master_seed, const CampaignConfig& config = {},
                            unsigned threads = 1);

nlohmann::ordered_json to_json(const CampaignReport& report);
nlohmann::ordered_json to_json(const InstanceSpec& spec);
std::string report_text(const CampaignReport& report);

}  // namespace cgf

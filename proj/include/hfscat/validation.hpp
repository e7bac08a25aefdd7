#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hfscat {

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string note;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

// Acceptance criteria 1..10 on their fixed desk-scale configurations.
// work is a scratch directory for criteria that run the file pipeline.
CriterionReport run_criterion(int id, const std::filesystem::path& work = {});

// propagator | dynamics | scattering | kernels | inversion | uniqueness | all
std::vector<int> suite_criteria(const std::string& suite);

nlohmann::json to_json(const CriterionReport& r);
std::string summary_line(const CriterionReport& r);

}  // namespace hfscat

#include <CLI11.hpp>
#include <iostream>

#include "hfscat/validation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> ids;
  std::string work;
  app.add_option("--criterion", ids, "criterion numbers (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--work", work, "scratch directory for pipeline runs");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int k = 1; k <= 10; ++k) ids.push_back(k);
  bool ok = true;
  for (int id : ids) {
    const hfscat::CriterionReport r = hfscat::run_criterion(id, work);
    std::cout << hfscat::summary_line(r) << std::endl;
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

#pragma once

#include <string>
#include <vector>

#include "intimacy/config.hpp"

namespace intimacy {

// Exit codes: 0 success, 1 internal error, 2 usage/config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

struct PrepareOptions {};
struct TrainOptions {
  bool force = false;
};
struct PredictOptions {};
struct EvaluateOptions {
  bool kde = false;
  std::string kde_svg;  // optional plot file
  std::string format = "table";
};
struct ReportOptions {
  std::string report_path;
  std::string format = "table";
  std::string out_file;  // empty = stdout
};

int cmd_prepare(const RunConfig& config, const PrepareOptions& options);
int cmd_train(const RunConfig& config, const TrainOptions& options);
int cmd_predict(const RunConfig& config, const PredictOptions& options);
int cmd_evaluate(const RunConfig& config, const EvaluateOptions& options);
int cmd_report(const RunConfig& config, const ReportOptions& options);

// Full argv entry point, also used by tests.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace intimacy

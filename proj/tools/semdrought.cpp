#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "semdrought/cep/rule.hpp"
#include "semdrought/core/error.hpp"
#include "semdrought/core/lexical.hpp"
#include "semdrought/service/config.hpp"
#include "semdrought/service/http.hpp"
#include "semdrought/service/pipeline.hpp"
#include "semdrought/store/ntriples.hpp"

using namespace semdrought;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open " + path, path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

service::Config config_or_exit(const std::string& path) {
  try {
    return service::load_config(path);
  } catch (const Error& e) {
    std::cerr << "semdrought: " << e.what() << '\n';
    std::exit(kUsage);
  }
}

int serve(const std::string& config_path) {
  auto config = config_or_exit(config_path);
  service::Pipeline pipeline(config);
  service::HttpServer server(pipeline);
  const int port = server.bind(config.http.host, config.http.port);
  if (port < 0) {
    std::cerr << "semdrought: cannot bind " << config.http.host << ':' << config.http.port << '\n';
    return kRuntime;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "semdrought: listening on " << config.http.host << ':' << port << '\n';
  server.listen();
  g_server = nullptr;
  pipeline.write_snapshot();
  return kOk;
}

int replay(const std::string& config_path, const std::string& input, double speed) {
  auto config = config_or_exit(config_path);
  service::Pipeline pipeline(config);
  const auto summary = pipeline.replay_file(input, speed);
  std::cout << summary.to_json().dump() << '\n';
  return kOk;
}

int print_forecast(const std::string& config_path, const std::string& region, const std::string& period) {
  auto config = config_or_exit(config_path);
  const auto month = parse_year_month(period);
  if (!month) {
    std::cerr << "semdrought: period must be YYYY-MM\n";
    return kUsage;
  }
  service::Pipeline pipeline(config);
  std::cout << forecast::bulletin_to_json(pipeline.forecast(region, month)).dump(2) << '\n';
  return kOk;
}

int validate_rules(const std::string& path) {
  try {
    const auto rules = cep::parse_ruleset(read_file(path));
    std::cout << rules.size() << " rules ok\n";
    return kOk;
  } catch (const ParseFailure& e) {
    std::cerr << path << ':' << e.line() << ':' << e.column() << ": " << e.what() << '\n';
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << '\n';
  }
  return kUsage;
}

int export_store(const std::string& config_path, const std::string& out) {
  auto config = config_or_exit(config_path);
  service::Pipeline pipeline(config);
  store::write_atomically(out, pipeline.export_ntriples());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic drought middleware"};
  app.require_subcommand(1);
  std::string config, input, region, period, file, out;
  double speed = 0.0;

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", config, "Config file")->required();

  auto* replay_cmd = app.add_subcommand("replay", "Replay a line-delimited dataset");
  replay_cmd->add_option("--config", config, "Config file")->required();
  replay_cmd->add_option("--input", input, "Dataset file")->required();
  replay_cmd->add_option("--speed", speed, "Time multiplier, 0 for no delay")->check(CLI::NonNegativeNumber);

  auto* forecast_cmd = app.add_subcommand("forecast", "Print the bulletin for a region and month");
  forecast_cmd->add_option("--config", config, "Config file")->required();
  forecast_cmd->add_option("--region", region, "Region id")->required();
  forecast_cmd->add_option("--period", period, "YYYY-MM")->required();

  auto* validate_cmd = app.add_subcommand("validate-rules", "Check a CEP rule file");
  validate_cmd->add_option("--file", file, "Rule file")->required();

  auto* export_cmd = app.add_subcommand("export", "Write the saturated store as N-Triples");
  export_cmd->add_option("--config", config, "Config file")->required();
  export_cmd->add_option("--out", out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*serve_cmd) return serve(config);
    if (*replay_cmd) return replay(config, input, speed);
    if (*forecast_cmd) return print_forecast(config, region, period);
    if (*validate_cmd) return validate_rules(file);
    if (*export_cmd) return export_store(config, out);
  } catch (const Error& e) {
    std::cerr << "semdrought: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "semdrought: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

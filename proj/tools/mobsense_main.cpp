// mobsense: feature extraction from passive mobile-sensing scan logs.
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobsense/ingest.hpp"
#include "mobsense/report.hpp"
#include "mobsense/synth.hpp"
#include "mobsense/timeutil.hpp"

namespace {

using namespace mobsense;

struct CommonOpts {
  std::string input = "-";
  std::string schedule_path;
  std::string out = "-";
  std::string format = "json";
  std::string tz = "+10:00";
  std::uint64_t seed = 0;
  std::string salt = "synthetic-study";
  bool unsalted = false;
  bool filter_phones = false;
  std::string mode = "mean_of_kinds";
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ParseResult load_events(const CommonOpts& c) {
  IngestOptions opt;
  opt.hash = {c.salt, c.unsalted};
  opt.filter_phones = c.filter_phones;
  if (c.input == "-") return parse_scan_log(std::cin, opt);
  std::ifstream in(c.input);
  if (!in) throw DataError("cannot open input: " + c.input);
  return parse_scan_log(in, opt);
}

void report_line_errors(const ParseResult& r) {
  for (const auto& e : r.errors)
    std::cerr << "line " << e.line << ": " << e.reason << "\n";
}

StudySchedule load_schedule(const CommonOpts& c) {
  if (c.schedule_path.empty()) throw DataError("--schedule is required for this command");
  try {
    return schedule_from_file(c.schedule_path);
  } catch (const std::exception& e) {
    throw DataError(c.schedule_path + ": " + e.what());
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw DataError("cannot open output: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

AnalysisOptions make_options(const CommonOpts& c) {
  AnalysisOptions opt;
  opt.schedule = load_schedule(c);
  auto tz = parse_tz_offset_minutes(c.tz);
  if (!tz) throw DataError("bad --tz-offset: " + c.tz);
  opt.tz_offset_minutes = *tz;
  opt.cluster.seed = c.seed;
  opt.completeness_mode =
      c.mode == "scan_cycles" ? CompletenessMode::scan_cycles : CompletenessMode::mean_of_kinds;
  return opt;
}

StudyReport run_analysis(const CommonOpts& c, AnalysisOptions& opt) {
  opt = make_options(c);
  auto parsed = load_events(c);
  report_line_errors(parsed);
  return analyze(parsed.events, opt);
}

void add_common(CLI::App* cmd, CommonOpts& c, bool with_schedule = true) {
  cmd->add_option("--input", c.input, "Scan-log JSONL path, or - for stdin");
  if (with_schedule)
    cmd->add_option("--schedule", c.schedule_path, "StudySchedule JSON path");
  cmd->add_option("--out", c.out, "Output path, or - for stdout");
  cmd->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tz-offset", c.tz, "Local-time offset, e.g. +10:00");
  cmd->add_option("--seed", c.seed, "Seed for k-means restarts");
  cmd->add_option("--salt", c.salt, "Salt for hashing raw device identifiers");
  cmd->add_flag("--unsalted", c.unsalted, "Allow hashing with an empty salt");
  cmd->add_flag("--filter-phones", c.filter_phones,
                "Drop Bluetooth sightings whose major class is not Phone (0x200)");
  cmd->add_option("--completeness-mode", c.mode, "mean_of_kinds or scan_cycles")
      ->check(CLI::IsMember({"mean_of_kinds", "scan_cycles"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature extraction and analysis for passive mobile-sensing scan logs"};
  app.require_subcommand(1);

  CommonOpts c;

  auto* cmd_ingest = app.add_subcommand("ingest", "Validate and deidentify a scan log");
  bool strict = false;
  add_common(cmd_ingest, c, false);
  cmd_ingest->add_flag("--strict", strict, "Exit 2 when any line fails to parse");

  auto* cmd_completeness =
      app.add_subcommand("completeness", "Scheduled vs collected scan percentages");
  add_common(cmd_completeness, c);

  auto* cmd_social =
      app.add_subcommand("social", "Known/unknown Bluetooth device profiles by hour");
  add_common(cmd_social, c);

  auto* cmd_mobility =
      app.add_subcommand("mobility", "Location clusters and circadian movement");
  add_common(cmd_mobility, c);
  std::string clusters_out, cm_out;
  cmd_mobility->add_option("--clusters-out", clusters_out, "Cluster table CSV path");
  cmd_mobility->add_option("--cm-out", cm_out, "Circadian movement CSV path");

  auto* cmd_battery = app.add_subcommand("battery", "Discharge rates and battery-life model");
  add_common(cmd_battery, c);
  std::string lives_out;
  cmd_battery->add_option("--lives-out", lives_out, "Predicted battery-life CSV path");

  auto* cmd_stats =
      app.add_subcommand("stats", "Reliability and inference statistics for the study");
  add_common(cmd_stats, c);

  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic scan log with ground truth");
  std::string synth_config_path, manifest_out;
  int synth_participants = -1;
  double synth_delivery = -1;
  int synth_clusters = -1;
  add_common(cmd_synth, c);
  cmd_synth->add_option("--config", synth_config_path, "SynthConfig JSON path");
  cmd_synth->add_option("--participants", synth_participants, "Number of participants");
  cmd_synth->add_option("--delivery", synth_delivery, "Per-scan delivery probability");
  cmd_synth->add_option("--clusters", synth_clusters, "Planted location clusters per participant");
  cmd_synth->add_option("--manifest-out", manifest_out, "Ground-truth manifest JSON path");

  auto* cmd_report = app.add_subcommand("report", "All analyses as one JSON document");
  add_common(cmd_report, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_ingest->parsed()) {
      auto parsed = load_events(c);
      report_line_errors(parsed);
      Output out(c.out);
      for (const auto& e : parsed.events) out.stream() << to_json_line(e) << "\n";
      return (strict && !parsed.errors.empty()) ? 2 : 0;
    }

    if (cmd_synth->parsed()) {
      SynthConfig cfg;
      const bool has_config = !synth_config_path.empty();
      if (has_config) {
        std::ifstream in(synth_config_path);
        if (!in) throw DataError("cannot open config: " + synth_config_path);
        cfg = synth_config_from_json(read_all(in));
      }
      // Explicit flags override the config file; otherwise its values stand.
      if (!has_config || cmd_synth->count("--seed")) cfg.seed = c.seed;
      if (!c.schedule_path.empty()) cfg.schedule = load_schedule(c);
      if (!has_config || cmd_synth->count("--tz-offset")) {
        auto tz = parse_tz_offset_minutes(c.tz);
        if (!tz) throw DataError("bad --tz-offset: " + c.tz);
        cfg.tz_offset_minutes = *tz;
      }
      if (!has_config || cmd_synth->count("--salt")) cfg.salt = c.salt;
      if (synth_participants > 0) cfg.n_participants = synth_participants;
      if (synth_delivery >= 0) cfg.defaults.delivery_probability = synth_delivery;
      if (synth_clusters > 0) cfg.defaults.cluster_count = synth_clusters;
      Output out(c.out);
      auto manifest = generate(cfg, out.stream());
      if (!manifest_out.empty()) {
        Output mout(manifest_out);
        mout.stream() << manifest_to_json(manifest) << "\n";
      }
      return 0;
    }

    AnalysisOptions opt;
    const StudyReport report = run_analysis(c, opt);
    const bool csv = c.format == "csv";

    if (cmd_completeness->parsed()) {
      Output out(c.out);
      if (csv) {
        write_completeness_csv(out.stream(), report);
      } else {
        auto doc = report_to_json(report, opt);
        nlohmann::ordered_json slim;
        slim["schedule"] = doc["schedule"];
        slim["participants"] = nlohmann::ordered_json::array();
        for (const auto& p : doc["participants"])
          slim["participants"].push_back(nlohmann::ordered_json{
              {"participant_id", p["participant_id"]},
              {"device_os", p["device_os"]},
              {"device_model", p["device_model"]},
              {"completeness", p["completeness"]}});
        slim["completeness_by_os"] = doc["group"]["completeness_by_os"];
        out.stream() << slim.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_social->parsed()) {
      Output out(c.out);
      if (csv) {
        write_social_csv(out.stream(), report);
      } else {
        auto doc = report_to_json(report, opt);
        nlohmann::ordered_json slim;
        slim["participants"] = nlohmann::ordered_json::array();
        for (const auto& p : doc["participants"])
          slim["participants"].push_back(
              nlohmann::ordered_json{{"participant_id", p["participant_id"]},
                                     {"social_profile", p["social_profile"]}});
        out.stream() << slim.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_mobility->parsed()) {
      if (!clusters_out.empty()) {
        Output out(clusters_out);
        write_clusters_csv(out.stream(), report);
      }
      if (!cm_out.empty()) {
        Output out(cm_out);
        write_circadian_csv(out.stream(), report);
      }
      if (clusters_out.empty() && cm_out.empty()) {
        Output out(c.out);
        if (csv) {
          write_clusters_csv(out.stream(), report);
        } else {
          auto doc = report_to_json(report, opt);
          nlohmann::ordered_json slim;
          slim["participants"] = nlohmann::ordered_json::array();
          for (const auto& p : doc["participants"])
            slim["participants"].push_back(
                nlohmann::ordered_json{{"participant_id", p["participant_id"]},
                                       {"mobility", p["mobility"]}});
          out.stream() << slim.dump(2) << "\n";
        }
      }
      return 0;
    }

    if (cmd_battery->parsed()) {
      Output out(c.out);
      if (csv) {
        write_battery_observations_csv(out.stream(), report);
        if (!lives_out.empty()) {
          Output lout(lives_out);
          write_battery_lives_csv(lout.stream(), report);
        }
      } else {
        auto doc = report_to_json(report, opt);
        nlohmann::ordered_json slim;
        slim["battery"] = doc["group"]["battery"];
        slim["observations"] = nlohmann::ordered_json::array();
        for (const auto& p : doc["participants"])
          slim["observations"].push_back(
              nlohmann::ordered_json{{"participant_id", p["participant_id"]},
                                     {"battery_observations", p["battery_observations"]}});
        out.stream() << slim.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_stats->parsed()) {
      Output out(c.out);
      auto doc = report_to_json(report, opt);
      if (csv) {
        out.stream() << "metric,value\n";
        auto& g = doc["group"];
        auto put = [&](const char* name, const nlohmann::ordered_json& v) {
          out.stream() << name << ',' << (v.is_null() ? "" : v.dump()) << '\n';
        };
        put("completeness_t", g["completeness_by_os"]["t_test"].is_null()
                                  ? nlohmann::ordered_json(nullptr)
                                  : g["completeness_by_os"]["t_test"]["t"]);
        put("completeness_t_p", g["completeness_by_os"]["t_test"].is_null()
                                    ? nlohmann::ordered_json(nullptr)
                                    : g["completeness_by_os"]["t_test"]["p"]);
        put("circadian_alpha", g["circadian_reliability"]["alpha"]);
        if (!g["circadian_reliability"]["anova"].is_null()) {
          put("circadian_anova_F", g["circadian_reliability"]["anova"]["F"]);
          put("circadian_anova_p", g["circadian_reliability"]["anova"]["p"]);
          put("circadian_anova_epsilon", g["circadian_reliability"]["anova"]["epsilon"]);
        }
      } else {
        nlohmann::ordered_json slim;
        slim["completeness_by_os"] = doc["group"]["completeness_by_os"];
        slim["circadian_reliability"] = doc["group"]["circadian_reliability"];
        out.stream() << slim.dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_report->parsed()) {
      if (csv)
        throw UsageError("report emits a single JSON document; use the per-analysis commands for CSV");
      Output out(c.out);
      out.stream() << report_to_json(report, opt).dump(2) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

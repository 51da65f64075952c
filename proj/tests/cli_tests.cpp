#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = MOBSENSE_CLI;
const std::string kData = MOBSENSE_DATA_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mobsense_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kValidLine =
    R"({"participant_id":"p1","device_os":"android","timestamp":"2018-03-05T00:00:00Z","kind":"battery","payload":{"level_pct":50.0,"charging":false}})";

}  // namespace

TEST_CASE("synth and report runs are byte-identical for a fixed seed") {
  TempDir dir;
  const std::string schedule = kData + "/four_week_schedule.json";
  const std::string base = kCli + " synth --seed 7 --participants 2 --schedule " + schedule;
  CHECK(run(base + " --out " + dir.file("a.jsonl") + " --manifest-out " + dir.file("ma.json")) == 0);
  CHECK(run(base + " --out " + dir.file("b.jsonl") + " --manifest-out " + dir.file("mb.json")) == 0);
  CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));
  CHECK(slurp(dir.file("ma.json")) == slurp(dir.file("mb.json")));
  CHECK_FALSE(slurp(dir.file("a.jsonl")).empty());

  const std::string report = kCli + " report --input " + dir.file("a.jsonl") + " --schedule " +
                             schedule + " --seed 7";
  CHECK(run(report + " --out " + dir.file("ra.json")) == 0);
  CHECK(run(report + " --out " + dir.file("rb.json")) == 0);
  const auto ra = slurp(dir.file("ra.json"));
  CHECK(ra == slurp(dir.file("rb.json")));
  CHECK(ra.find("\"scheduled_count\": 9156") != std::string::npos);
}

TEST_CASE("ingest reports malformed lines without aborting") {
  TempDir dir;
  write(dir.file("in.jsonl"), std::string(kValidLine) + "\nnot json\n" + kValidLine + "\n");
  const std::string cmd = kCli + " ingest --input " + dir.file("in.jsonl") + " --out " +
                          dir.file("out.jsonl") + " 2> " + dir.file("err.txt");
  CHECK(run(cmd) == 0);
  const auto err = slurp(dir.file("err.txt"));
  CHECK(err.find("line 2:") != std::string::npos);
  // Two valid records survive.
  const auto out = slurp(dir.file("out.jsonl"));
  CHECK(std::count(out.begin(), out.end(), '\n') == 2);

  CHECK(run(cmd + " --strict") == 2);
}

TEST_CASE("ingest accepts stdin") {
  TempDir dir;
  const std::string cmd = std::string("printf '%s\\n' '") + kValidLine + "' | " + kCli +
                          " ingest --input - --out " + dir.file("out.jsonl");
  CHECK(run(cmd) == 0);
  CHECK(slurp(dir.file("out.jsonl")).find("\"p1\"") != std::string::npos);
}

TEST_CASE("completeness on an empty input reports the schedule arithmetic") {
  TempDir dir;
  write(dir.file("empty.jsonl"), "");
  const std::string cmd = kCli + " completeness --input " + dir.file("empty.jsonl") +
                          " --schedule " + kData + "/four_week_schedule.json --out " +
                          dir.file("c.json");
  CHECK(run(cmd) == 0);
  const auto out = slurp(dir.file("c.json"));
  CHECK(out.find("\"scheduled_count\": 9156") != std::string::npos);

  CHECK(run(kCli + " completeness --input " + dir.file("empty.jsonl") + " --schedule " + kData +
            "/four_week_schedule.json --format csv --out " + dir.file("c.csv")) == 0);
  CHECK(slurp(dir.file("c.csv")) ==
        "participant_id,os,model,scheduled,collected,completeness_pct\n");
}

TEST_CASE("exit codes distinguish usage and data errors") {
  TempDir dir;
  write(dir.file("empty.jsonl"), "");
  CHECK(run(kCli + " --no-such-flag 2> /dev/null") == 1);
  CHECK(run(kCli + " 2> /dev/null") == 1);  // a subcommand is required
  CHECK(run(kCli + " report --input " + dir.file("missing.jsonl") + " --schedule " + kData +
            "/four_week_schedule.json 2> /dev/null") == 2);
  CHECK(run(kCli + " report --input " + dir.file("empty.jsonl") +
            " --schedule /nonexistent.json 2> /dev/null") == 2);
  CHECK(run(kCli + " report --input " + dir.file("empty.jsonl") + " --schedule " + kData +
            "/four_week_schedule.json --format csv 2> /dev/null") == 1);
  CHECK(run(kCli + " --help > /dev/null") == 0);
}

TEST_CASE("analysis subcommands emit their csv tables") {
  TempDir dir;
  const std::string schedule = dir.file("schedule.json");
  write(schedule, R"({"weeks":[
    {"start":"2018-03-05T00:00:00Z","end":"2018-03-07T00:00:00Z","interval_minutes":8},
    {"start":"2018-03-07T00:00:00Z","end":"2018-03-09T00:00:00Z","interval_minutes":5}]})");
  CHECK(run(kCli + " synth --seed 3 --participants 1 --clusters 3 --schedule " + schedule +
            " --out " + dir.file("d.jsonl")) == 0);

  const std::string common =
      " --input " + dir.file("d.jsonl") + " --schedule " + schedule;
  CHECK(run(kCli + " social" + common + " --format csv --out " + dir.file("social.csv")) == 0);
  CHECK(slurp(dir.file("social.csv")).rfind("participant_id,hour,", 0) == 0);

  CHECK(run(kCli + " mobility" + common + " --clusters-out " + dir.file("k.csv") +
            " --cm-out " + dir.file("cm.csv")) == 0);
  const auto clusters_csv = slurp(dir.file("k.csv"));
  CHECK(clusters_csv.rfind("participant_id,cluster_id,", 0) == 0);
  CHECK(slurp(dir.file("cm.csv")).rfind("participant_id,week,", 0) == 0);
  // Header plus one planted cluster row per K.
  CHECK(std::count(clusters_csv.begin(), clusters_csv.end(), '\n') == 4);

  CHECK(run(kCli + " battery" + common + " --format csv --out " + dir.file("b.csv") +
            " --lives-out " + dir.file("lives.csv")) == 0);
  CHECK(slurp(dir.file("b.csv")).rfind("participant_id,week,scan_rate,", 0) == 0);
  CHECK(slurp(dir.file("lives.csv")).rfind("scan_rate,predicted_life_hours", 0) == 0);

  CHECK(run(kCli + " stats" + common + " --out " + dir.file("s.json")) == 0);
  CHECK(slurp(dir.file("s.json")).find("circadian_reliability") != std::string::npos);
}

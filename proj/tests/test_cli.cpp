#include <doctest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "mymove/io.hpp"
#include "support/tmpdir.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell with stderr folded into stdout.
Run cli(const std::string& args) {
  std::string cmd = std::string("env -u MYMOVE_DATA_DIR -u MYMOVE_LEXICON -u MYMOVE_SERVER -u MYMOVE_TOKEN '") +
                    MYMOVE_CLI + "' " + args + " 2>&1";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) { return mymove::read_file_text(p.string()); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("simulate --days 0").code == 2);
  CHECK(cli("simulate --bogus").code == 2);
  testing_support::TempDir dir("cli");
  auto r = cli("--data-dir '" + dir.str() + "/empty' extract");
  CHECK(r.code == 1);
  CHECK(r.out.find("mymove: ") != std::string::npos);
  CHECK(cli("wer --ref /nonexistent --hyp /nonexistent").code == 1);
}

TEST_CASE("wer subcommand") {
  testing_support::TempDir dir("cli");
  write(dir / "ref.txt", "eating lunch and about to get on a zoom call\nI'm watching TV\n");
  write(dir / "hyp.txt", "eating lunch Ann about to get on a zoom call\ni am watching tv\n");
  auto same = cli("wer --ref '" + (dir / "ref.txt") + "' --hyp '" + (dir / "ref.txt") + "'");
  CHECK(same.code == 0);
  CHECK(same.out == "0.0000\n");
  auto r = cli("wer --per-line --ref '" + (dir / "ref.txt") + "' --hyp '" + (dir / "hyp.txt") + "'");
  CHECK(r.code == 0);
  CHECK(r.out == "0.1000\n0.0000\n0.0714\n");
  write(dir / "short.txt", "one line\n");
  CHECK(cli("wer --ref '" + (dir / "ref.txt") + "' --hyp '" + (dir / "short.txt") + "'").code == 1);
}

TEST_CASE("offline pipeline is reproducible and agrees with the ledger") {
  testing_support::TempDir a("cli"), b("cli");
  for (const auto* d : {&a, &b}) {
    std::string root = "--data-dir '" + d->str() + "' ";
    auto sim = cli(root + "simulate --days 2 --seed 5 --inertial-stride 60");
    REQUIRE(sim.code == 0);
    REQUIRE(cli(root + "extract").code == 0);
    REQUIRE(cli(root + "align").code == 0);
    auto m = cli(root + "metrics");
    REQUIRE(m.code == 0);
    CHECK(m.out.find("ledger agreement") != std::string::npos);
    auto s = cli(root + "summarize");
    REQUIRE(s.code == 0);
    CHECK(s.out.find("ledger check: match") != std::string::npos);
  }
  for (const char* f : {"traces/reports.jsonl", "traces/scheduler.jsonl", "traces/ledger.json",
                        "labels/activities.jsonl", "metrics/alignment.csv", "metrics/intensity.csv",
                        "metrics/agreement.json", "metrics/summary.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a.path() / f));
    CHECK(slurp(a.path() / f) == slurp(b.path() / f));
  }
  for (const auto& e : fs::recursive_directory_iterator(a.path() / "traces/batches")) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), a.path());
    CHECK(mymove::read_file_bytes(e.path().string()) == mymove::read_file_bytes((b.path() / rel).string()));
  }
  auto agreement = nlohmann::json::parse(slurp(a.path() / "metrics/agreement.json"));
  CHECK(agreement["perfect"] == true);
  CHECK(fs::exists(a.path() / "metrics/timeline/P01.csv"));
}

TEST_CASE("serve, upload and summarize over HTTP") {
  testing_support::TempDir work("cli"), data("cli");
  REQUIRE(cli("--data-dir '" + work.str() + "' simulate --days 1 --inertial-stride 0").code == 0);

  int pipefd[2];
  REQUIRE(::pipe(pipefd) == 0);
  pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::dup2(pipefd[1], STDOUT_FILENO);
    ::close(pipefd[0]);
    ::execl(MYMOVE_CLI, MYMOVE_CLI, "--data-dir", data.str().c_str(), "serve", "--listen", "127.0.0.1:0",
            "--token", "t0k", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(pipefd[1]);
  std::string line;
  char ch;
  while (::read(pipefd[0], &ch, 1) == 1 && ch != '\n') line += ch;
  std::smatch m;
  bool ok = std::regex_search(line, m, std::regex(R"(listening on 127\.0\.0\.1:(\d+))"));
  CAPTURE(line);
  if (ok) {
    std::string server = "--server 127.0.0.1:" + m[1].str();
    std::string root = "--data-dir '" + work.str() + "' ";
    CHECK(cli(root + "upload " + server + " --token wrong").code == 1);
    auto up = cli(root + "upload " + server + " --token t0k");
    CHECK(up.code == 0);
    CHECK(up.out.find("reports 0 new") == std::string::npos);
    auto again = cli(root + "upload " + server + " --token t0k");
    CHECK(again.out.find("reports 0 new") != std::string::npos);
    auto s = cli(root + "summarize " + server);
    CHECK(s.code == 0);
    CHECK(s.out.find("ledger check: match") != std::string::npos);
  }
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ::close(pipefd[0]);
  REQUIRE(ok);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(data.path() / "reports.jsonl"));
}

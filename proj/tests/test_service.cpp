#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/service.hpp"
#include "mymove/sim.hpp"
#include "support/tmpdir.hpp"

using namespace mymove;

namespace {

VerbalReport report(std::string id, std::string text, const char* at = "2021-05-10T12:33:00Z",
                    std::string device = "W01", std::string pid = "P01") {
  return {std::move(id), std::move(device), std::move(pid), ReportMethod::voluntary, parse_iso(at), 12.0,
          std::move(text)};
}

ServiceConfig config_for(const testing_support::TempDir& dir) {
  ServiceConfig cfg;
  cfg.data_dir = dir.str();
  return cfg;
}

ErrorCode error_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::kInvalidArgument;
}

std::string schedule_jsonl(const ParticipantTrace& p) {
  std::string out;
  for (const auto& e : p.scheduler_events) out += to_jsonl(e) + "\n";
  return out;
}

}  // namespace

TEST_CASE("reports are idempotent by id") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  auto r = report("r1", "Ate lunch from 12:00 until 12:30.");
  auto up = svc.submit_report(r);
  CHECK(up.status == UploadStatus::created);
  REQUIRE(up.activities.size() == 1);
  CHECK(up.activities[0].activity_type == ActivityType::eating_food);
  REQUIRE(up.activities[0].timespan);
  CHECK(format_iso(up.activities[0].timespan->start) == "2021-05-10T12:00:00.000Z");

  auto again = svc.submit_report(r);
  CHECK(again.status == UploadStatus::duplicate);
  CHECK(again.activities == up.activities);

  auto changed = r;
  changed.transcript = "something else";
  CHECK(error_of([&] { svc.submit_report(changed); }) == ErrorCode::kConflict);
  CHECK(svc.participants() == std::vector<std::string>{"P01"});
  CHECK(svc.report("r1") == r);
  CHECK_FALSE(svc.report("nope"));
}

TEST_CASE("report validation") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  auto r = report("r1", "I'm watching TV");
  r.audio_duration_s = 120.5;
  CHECK(error_of([&] { svc.submit_report(r); }) == ErrorCode::kInvalidArgument);
  r.audio_duration_s = -1;
  CHECK(error_of([&] { svc.submit_report(r); }) == ErrorCode::kInvalidArgument);
  r.audio_duration_s = 120.0;
  CHECK(svc.submit_report(r).status == UploadStatus::created);
  CHECK(error_of([&] { svc.submit_report(report("r2", "  ")); }) == ErrorCode::kEmptyTranscript);
  CHECK_FALSE(svc.report("r2"));
}

TEST_CASE("devices belong to one participant") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  svc.register_device("W01", "P01");
  svc.register_device("W01", "P01");
  CHECK(error_of([&] { svc.register_device("W01", "P02"); }) == ErrorCode::kConflict);
  CHECK(error_of([&] { svc.submit_report(report("r1", "I'm watching TV", "2021-05-10T12:00:00Z", "W01", "P02")); }) ==
        ErrorCode::kConflict);
  CHECK(error_of([&] { svc.register_device("", "P01"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("batches") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  SensorBatch b;
  b.device_id = "W01";
  b.sequence = 4;
  b.vitals.push_back({parse_iso("2021-05-10T10:00:00Z"), 12, 80.0f});
  auto bytes = encode_batch(b);
  SensorBatch decoded;
  CHECK(svc.submit_batch(bytes, &decoded).accepted);
  CHECK(decoded == b);
  CHECK(svc.submit_batch(bytes).duplicate);
  b.sequence = 7;
  auto ack = svc.submit_batch(encode_batch(b));
  REQUIRE(ack.new_gaps.size() == 1);
  CHECK(ack.new_gaps[0] == GapRange{5, 6});
  std::vector<std::uint8_t> junk{1, 2, 3};
  CHECK(error_of([&] { svc.submit_batch(junk); }) == ErrorCode::kFormat);
  bytes[30 % bytes.size()] ^= 0x40;
  CHECK_THROWS_AS(svc.submit_batch(bytes), Error);
  CHECK(svc.batches().stored_count() == 2);
}

TEST_CASE("corrections compose and can add lexicon overrides") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  svc.submit_report(report("r1", "Zorbing with friends."));
  auto before = svc.activity("r1#0");
  CHECK_FALSE(before.activity_type);

  LabelCorrection c{"r1#0", LabelField::activity_type, "", "cardio", "coder1", parse_iso("2021-06-01T00:00:00Z"),
                    "zorbing"};
  auto after = svc.put_correction(c);
  CHECK(after.activity_type == ActivityType::cardio);
  CHECK(after.semantic == Semantic::exercise);
  auto stored = svc.corrections("r1#0");
  REQUIRE(stored.size() == 1);
  CHECK(stored[0].old_value == "unknown");
  REQUIRE(svc.lexicon_overrides().size() == 1);
  CHECK(svc.lexicon_overrides()[0].rfind("zorbing\tactivity_type\tcardio", 0) == 0);

  // New uploads use the override.
  auto up = svc.submit_report(report("r2", "More zorbing today.", "2021-05-11T12:00:00Z"));
  CHECK(up.activities[0].activity_type == ActivityType::cardio);

  c.field = LabelField::effort;
  c.new_value = "moderate";
  c.lexicon_pattern = "";
  CHECK(svc.put_correction(c).effort->category == EffortCategory::moderate);
  CHECK(svc.corrections("r1#0").size() == 2);

  CHECK(error_of([&] { svc.put_correction({"r9#0", LabelField::effort, "", "low", "c", {}, ""}); }) ==
        ErrorCode::kNotFound);
  CHECK(error_of([&] { svc.put_correction({"r1#0", LabelField::effort, "", "huge", "c", {}, ""}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { svc.put_correction({"r1#0", LabelField::semantic, "", "social", "c", {}, "x"}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { svc.put_correction({"r1#0", LabelField::activity_type, "", "tv", "c", {}, "a\tb"}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { svc.activity("r1#5"); }) == ErrorCode::kNotFound);
}

TEST_CASE("activity filters") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  svc.submit_report(report("a", "I'm watching TV"));
  svc.submit_report(report("b", "Ate lunch.", "2021-05-10T13:00:00Z", "W02", "P02"));
  auto prompted = report("c", "Reading the newspaper.");
  prompted.method = ReportMethod::prompted;
  svc.submit_report(prompted);
  CHECK(svc.activities().size() == 3);
  ActivityFilter f;
  f.participant_id = "P01";
  CHECK(svc.activities(f).size() == 2);
  f.method = ReportMethod::prompted;
  CHECK(svc.activities(f).size() == 1);
  ActivityFilter t;
  t.activity_type = "tv";
  REQUIRE(svc.activities(t).size() == 1);
  CHECK(svc.activities(t)[0].report_id == "a");
  ActivityFilter d;
  d.device_id = "W02";
  CHECK(svc.activities(d).size() == 1);
}

TEST_CASE("summaries") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  svc.submit_report(report("a", "I'm watching TV", "2021-05-10T12:00:00Z"));
  svc.submit_report(report("b", "Ate lunch.", "2021-05-11T12:00:00Z"));
  auto s = svc.participant_summary("P01");
  CHECK(s["reports"]["P01"]["total"] == 2);
  auto one_day = svc.participant_summary("P01", "2021-05-11", "2021-05-11");
  CHECK(one_day["reports"]["P01"]["total"] == 1);
  CHECK(error_of([&] { svc.participant_summary("P77"); }) == ErrorCode::kNotFound);
  CHECK(error_of([&] { svc.participant_summary("P01", "May 1"); }) == ErrorCode::kInvalidArgument);
  CHECK(svc.corpus_summary()["reports_total"]["voluntary"] == 2);
}

TEST_CASE("schedule events are stored once") {
  testing_support::TempDir dir("svc");
  StudyService svc(config_for(dir));
  SimConfig cfg;
  cfg.days = 1;
  cfg.generate_sensors = false;
  auto trace = run(load_script("default"), cfg);
  const auto& p = trace.participants[0];
  auto lines = schedule_jsonl(p);
  CHECK(svc.append_schedule_events(p.device_id, lines) == p.scheduler_events.size());
  CHECK(svc.append_schedule_events(p.device_id, lines) == 0);
  auto s = svc.schedule(p.device_id);
  CHECK(s["event_count"] == p.scheduler_events.size());
  CHECK(error_of([&] { svc.append_schedule_events("W99", lines); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { svc.append_schedule_events(p.device_id, "{\"kind\": \"deliver\"}\n"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { svc.schedule("W99"); }) == ErrorCode::kNotFound);
}

TEST_CASE("state survives a restart") {
  testing_support::TempDir dir("svc");
  SensorBatch b;
  b.device_id = "W01";
  b.sequence = 1;
  b.vitals.push_back({parse_iso("2021-05-10T12:00:00Z"), 3, std::nullopt});
  SimConfig cfg;
  cfg.days = 1;
  cfg.generate_sensors = false;
  auto trace = run(load_script("default"), cfg);
  const auto& p = trace.participants[0];
  std::vector<ExtractedActivity> acts;
  {
    StudyService svc(config_for(dir));
    svc.submit_report(report("r1", "Zorbing."));
    svc.submit_report(report("r2", "I'm watching TV"));
    svc.put_correction({"r1#0", LabelField::activity_type, "", "cardio", "c", parse_iso("2021-06-01T00:00:00Z"),
                        "zorbing"});
    svc.submit_batch(encode_batch(b));
    svc.append_schedule_events(p.device_id, schedule_jsonl(p));
    acts = svc.activities();
  }
  StudyService svc(config_for(dir));
  CHECK(svc.activities() == acts);
  CHECK(svc.corrections("r1#0").size() == 1);
  CHECK(svc.lexicon_overrides().size() == 1);
  CHECK(svc.batches().contains("W01", 1));
  CHECK(svc.schedule(p.device_id)["event_count"] == p.scheduler_events.size());
  CHECK(svc.append_schedule_events(p.device_id, schedule_jsonl(p)) == 0);
  CHECK(svc.submit_report(report("r3", "zorbing again", "2021-05-11T12:00:00Z")).activities[0].activity_type ==
        ActivityType::cardio);
  CHECK(svc.submit_batch(encode_batch(b)).duplicate);
}

TEST_CASE("config file, environment and listen parsing") {
  testing_support::TempDir dir("svc");
  auto path = dir / "serve.yaml";
  {
    std::ofstream f(path);
    f << "data_dir: /tmp/x\nlisten: 0.0.0.0:9000\ntoken: abc\nutc_offset_minutes: -240\n";
  }
  auto cfg = ServiceConfig::from_file(path);
  CHECK(cfg.data_dir == "/tmp/x");
  CHECK(cfg.host == "0.0.0.0");
  CHECK(cfg.port == 9000);
  CHECK(cfg.token == "abc");
  CHECK(cfg.utc_offset == std::chrono::minutes{-240});

  ::setenv("MYMOVE_LISTEN", "127.0.0.1:9100", 1);
  ::setenv("MYMOVE_TOKEN", "env-token", 1);
  cfg.apply_env();
  ::unsetenv("MYMOVE_LISTEN");
  ::unsetenv("MYMOVE_TOKEN");
  CHECK(cfg.port == 9100);
  CHECK(cfg.token == "env-token");
  CHECK(cfg.data_dir == "/tmp/x");

  CHECK_THROWS_AS(cfg.set_listen("nohost"), Error);
  CHECK_THROWS_AS(cfg.set_listen("h:99999"), Error);
  CHECK_THROWS_AS(ServiceConfig::from_file(dir / "missing.yaml"), Error);
}

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>

#include "mobsense/social.hpp"
#include "mobsense/timeutil.hpp"

using namespace mobsense;

namespace {

constexpr int kTz = 600;  // +10:00
const std::int64_t kDay0 = 1520208000;  // 2018-03-05T00:00:00Z (10:00 local)

std::string dev(char c) { return std::string(64, c); }

ScanEvent bt_event(std::int64_t ts, std::vector<std::string> ids) {
  ScanEvent e;
  e.participant_id = "p001";
  e.timestamp = ts;
  e.kind = ScanKind::bluetooth;
  BluetoothScan scan;
  for (auto& id : ids) scan.sightings.push_back({std::move(id), 0x200});
  e.payload = std::move(scan);
  return e;
}

}  // namespace

TEST_CASE("classify_devices applies the 3-distinct-day rule") {
  std::vector<ScanEvent> events;
  // Device 'a' on Mon, Wed, Fri; device 'b' 50 times on one day; device 'c' on 2 days.
  for (int d : {0, 2, 4}) events.push_back(bt_event(kDay0 + d * 86400, {dev('a')}));
  for (int i = 0; i < 50; ++i) events.push_back(bt_event(kDay0 + 86400 + i * 60, {dev('b')}));
  for (int d : {0, 1}) events.push_back(bt_event(kDay0 + d * 86400 + 3600, {dev('c')}));

  const auto p = classify_devices(events, 3, kTz);
  CHECK(p.known.count(dev('a')) == 1);
  CHECK(p.unknown.count(dev('b')) == 1);  // 1 distinct day despite 50 sightings
  CHECK(p.unknown.count(dev('c')) == 1);  // 2 days is below the boundary
  CHECK(p.known.size() + p.unknown.size() == p.history.size());
  CHECK(p.history.at(dev('b')).sightings == 50);
}

TEST_CASE("classification respects the local calendar date") {
  // 13:55Z and 14:05Z straddle local midnight in +10:00.
  std::vector<ScanEvent> events{
      bt_event(kDay0 + 13 * 3600 + 55 * 60, {dev('x')}),
      bt_event(kDay0 + 14 * 3600 + 5 * 60, {dev('x')}),
      bt_event(kDay0 + 3 * 86400, {dev('x')}),
  };
  const auto p = classify_devices(events, 3, kTz);
  CHECK(p.known.count(dev('x')) == 1);
  // Under UTC the first two collapse onto one date.
  const auto utc = classify_devices(events, 3, 0);
  CHECK(utc.unknown.count(dev('x')) == 1);
}

TEST_CASE("raising min_days never grows the known set") {
  std::mt19937_64 gen(3);
  std::vector<ScanEvent> events;
  for (int i = 0; i < 400; ++i)
    events.push_back(bt_event(kDay0 + static_cast<std::int64_t>(gen() % (14 * 86400)),
                              {dev(static_cast<char>('a' + gen() % 8))}));
  std::set<std::string> prev;
  for (int min_days = 1; min_days <= 8; ++min_days) {
    const auto p = classify_devices(events, min_days, kTz);
    if (min_days > 1)
      for (const auto& id : p.known) CHECK(prev.count(id) == 1);
    prev = p.known;
  }
}

TEST_CASE("social_profile with no events is all zero") {
  const auto s = four_week_schedule();
  const auto profile = social_profile({}, DevicePartition{}, kTz,
                                      ProfileDenominator::all_study_days, &s);
  CHECK(profile.denominator_days == 29);  // 28 days shifted by +10:00 touch 29 local dates
  for (const auto& row : profile.rows) {
    CHECK(row.mean_known == 0.0);
    CHECK(row.mean_unknown == 0.0);
  }
}

TEST_CASE("one known device each day during hour 9") {
  StudySchedule week;
  week.weeks = {{kDay0, kDay0 + 7 * 86400, 8.0}};
  std::vector<ScanEvent> events;
  // Local hour 9 is 23:00Z of the previous UTC day; kDay0 is 10:00 local.
  // Put a scan at local 09:30 on each of the 7 study days.
  for (int d = 0; d < 7; ++d) {
    const std::int64_t local_midnight = kDay0 - 10 * 3600 + d * 86400;
    events.push_back(bt_event(local_midnight + 9 * 3600 + 1800, {dev('k')}));
  }
  // Make 'k' known: it shows up on 7 distinct days.
  auto partition = classify_devices(events, 3, kTz);
  REQUIRE(partition.known.count(dev('k')) == 1);

  auto profile = social_profile(events, partition, kTz,
                                ProfileDenominator::all_study_days, &week);
  CHECK(profile.denominator_days == 8);  // 10:00 start shifts the window across 8 local dates
  // 7 of 8 local dates have the device during hour 9.
  CHECK(profile.rows[9].mean_known == doctest::Approx(7.0 / 8.0));
  const auto observed = social_profile(events, partition, kTz,
                                       ProfileDenominator::observed_days, &week);
  CHECK(observed.denominator_days == 7);
  CHECK(observed.rows[9].mean_known == doctest::Approx(1.0));
  for (int h = 0; h < 24; ++h) {
    if (h == 9) continue;
    CHECK(profile.rows[static_cast<std::size_t>(h)].mean_known == 0.0);
    CHECK(profile.rows[static_cast<std::size_t>(h)].mean_unknown == 0.0);
  }
}

TEST_CASE("partition preserves hourly totals and order does not matter") {
  std::mt19937_64 gen(23);
  std::vector<ScanEvent> events;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> ids;
    const int n = static_cast<int>(gen() % 4);
    for (int j = 0; j < n; ++j) ids.push_back(dev(static_cast<char>('a' + gen() % 10)));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    events.push_back(bt_event(kDay0 + static_cast<std::int64_t>(gen() % (7 * 86400)), ids));
  }
  const auto partition = classify_devices(events, 3, kTz);
  const auto profile = social_profile(events, partition, kTz);

  DevicePartition all_unknown;
  for (const auto& [id, h] : partition.history) all_unknown.unknown.insert(id);
  all_unknown.history = partition.history;
  const auto totals = social_profile(events, all_unknown, kTz);

  for (int h = 0; h < 24; ++h) {
    const auto& row = profile.rows[static_cast<std::size_t>(h)];
    CHECK(row.mean_known + row.mean_unknown ==
          doctest::Approx(totals.rows[static_cast<std::size_t>(h)].mean_unknown).epsilon(1e-12));
  }

  auto shuffled = events;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto profile2 = social_profile(shuffled, classify_devices(shuffled, 3, kTz), kTz);
  for (int h = 0; h < 24; ++h) {
    CHECK(profile.rows[static_cast<std::size_t>(h)].mean_known ==
          profile2.rows[static_cast<std::size_t>(h)].mean_known);
    CHECK(profile.rows[static_cast<std::size_t>(h)].mean_unknown ==
          profile2.rows[static_cast<std::size_t>(h)].mean_unknown);
  }
}

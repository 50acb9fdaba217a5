// Copyright 2026 The StructFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: runs each end-to-end criterion once at full scale and
// prints one PASS/FAIL line per criterion. Exits 1 if any fails.

#include <stdlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "structfuzz/archive.h"
#include "structfuzz/channel.h"
#include "structfuzz/common.h"
#include "structfuzz/corpus.h"
#include "structfuzz/coverage.h"
#include "structfuzz/dataset.h"
#include "structfuzz/engine.h"
#include "structfuzz/hexcodec.h"
#include "structfuzz/targets/chunkfmt.h"

namespace structfuzz {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Bytes RandomBytes(Rng& rng, size_t n) {
  Bytes b(n);
  for (uint8_t& x : b) x = static_cast<uint8_t>(rng.Next());
  return b;
}

fs::path MakeWorkDir() {
  std::string tmpl = (fs::temp_directory_path() / "sf_accept_XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) std::abort();
  return tmpl;
}

std::map<std::string, Bytes> Snapshot(const fs::path& dir) {
  std::map<std::string, Bytes> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).string();
    if (rel.rfind(".work", 0) == 0) continue;
    files[rel] = *ReadFileBytes(e.path());
  }
  return files;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// Ancestor walk over an id -> (origin, parent) table.
Lineage WalkLineage(
    const std::map<SeedId, std::pair<Origin, std::optional<SeedId>>>& table,
    SeedId id) {
  auto it = table.find(id);
  if (it->second.first == Origin::kLlm) return Lineage::kLlmDirect;
  for (std::optional<SeedId> p = it->second.second; p.has_value();) {
    auto a = table.find(*p);
    if (a == table.end()) break;
    if (a->second.first == Origin::kLlm) return Lineage::kLlmDescendant;
    p = a->second.second;
  }
  return Lineage::kNonLlm;
}

class Suite {
 public:
  explicit Suite(fs::path work) : work_(std::move(work)) {
    fs::create_directories(work_ / "seeds");
    (void)WriteFileBytes(work_ / "seeds" / "valid",
                         chunkfmt::BuildSeed(2, 2, 45455, {ToBytes("0123")}));
    Rng rng(7);
    fs::create_directories(work_ / "campaign_seeds");
    (void)WriteFileBytes(work_ / "campaign_seeds" / "valid",
                         chunkfmt::BuildSeed(2, 2, 45455,
                                             {RandomBytes(rng, 1024)}));
  }

  Outcome P1();
  Outcome P2();
  Outcome P3();
  Outcome P4();
  Outcome P5();
  Outcome P6();
  Outcome P7();
  Outcome P8();
  Outcome P9();

 private:
  CampaignConfig Chunkfmt(const std::string& out) {
    CampaignConfig c;
    c.target = "chunkfmt";
    c.corpus_dirs = {work_ / "seeds"};
    c.out_dir = work_ / out;
    c.iterations = 10000;
    c.rng_seed = 1;
    return c;
  }

  fs::path work_;
  fs::path p8_stub_run_;
};

Outcome Suite::P1() {
  const auto t0 = Clock::now();
  Rng rng(1);
  int empty = 0;
  for (int i = 0; i < 10000; ++i) {
    const Bytes x = RandomBytes(rng, rng.Below(2049));
    const std::string hex = EncodeHex(x);
    absl::StatusOr<Bytes> back = Decode(hex);
    if (!back.ok() || *back != x) {
      return {false, absl::StrCat("decode mismatch at sample ", i)};
    }
    std::optional<std::string> clean = SanitizeResponse(hex);
    if (x.empty()) {
      // An empty response carries no mutation and is void by contract.
      if (clean.has_value()) return {false, "empty response not void"};
      ++empty;
      continue;
    }
    if (!clean.has_value() || *clean != hex) {
      return {false, absl::StrCat("sanitize changed sample ", i)};
    }
  }
  const double s = SecondsSince(t0);
  return {s < 5.0,
          absl::StrFormat("10000 samples (%d empty, void) in %.2fs (limit 5s)",
                          empty, s)};
}

Outcome Suite::P2() {
  BoundedQueue q(30);
  for (uint64_t i = 1; i <= 1000; ++i) {
    q.Offer(MutationRequest{i, "CHUNKFMT", "00"});
  }
  if (q.size() != 30) return {false, absl::StrCat("size ", q.size())};
  for (size_t k = 0; k < 30; ++k) {
    if (q.entries()[k].seed_id != 971 + k) {
      return {false, absl::StrCat("slot ", k, " holds offer ", q.entries()[k].seed_id)};
    }
  }
  return {true, "queue holds offers 971..1000 in order"};
}

Outcome Suite::P3() {
  // Wall-clock throughput is noisy on a shared machine: runs go in ABBA
  // order and the medians are compared.
  std::vector<double> off, on;
  for (int rep = 0; rep < 8; ++rep) {
    for (bool second : {false, true}) {
      const bool llm = second != (rep % 2 == 1);
      CampaignConfig c = Chunkfmt(absl::StrCat("p3_", rep, llm ? "_on" : "_off"));
      c.llm_enabled = llm;
      c.endpoint = absl::StrCat("unix:", (work_ / "absent.sock").string());
      c.clock = ClockMode::kWall;
      c.stats_interval_s = 1.0;
      absl::StatusOr<CampaignStats> s = RunCampaign(c);
      if (!s.ok()) return {false, std::string(s.status().message())};
      if (s->final.iterations != 10000) {
        return {false, absl::StrCat("ran ", s->final.iterations, " iterations")};
      }
      (llm ? on : off).push_back(10000.0 / s->wall_seconds);
      fs::remove_all(c.out_dir);
    }
  }
  const double a = Median(off), b = Median(on);
  const double rel = std::fabs(b - a) / a;
  return {rel <= 0.10,
          absl::StrFormat("median iter/s off=%.0f on=%.0f diff=%.1f%% "
                          "(limit 10%%)",
                          a, b, 100 * rel)};
}

Outcome Suite::P4() {
  Rng rng(4);
  CoverageMap map;
  std::set<std::pair<EdgeId, int>> seen;  // (edge, bucket)
  size_t interesting = 0;
  for (int i = 0; i < 1000; ++i) {
    EdgeTrace t;
    const size_t k = 1 + rng.Below(24);
    for (size_t j = 0; j < k; ++j) {
      const uint32_t count = static_cast<uint32_t>(1 + rng.Below(1u << rng.Below(9)));
      t.Hit(static_cast<EdgeId>(rng.Below(256)), count);
    }
    // A new edge counts once as an edge; only known edges add buckets.
    size_t new_edges = 0, new_buckets = 0;
    std::set<EdgeId> known;
    for (const auto& [e, b] : seen) known.insert(e);
    for (const auto& [e, n] : t.hits()) {
      if (!known.contains(e)) {
        ++new_edges;
      } else if (!seen.contains({e, Bucketize(n)})) {
        ++new_buckets;
      }
    }
    for (const auto& [e, n] : t.hits()) seen.insert({e, Bucketize(n)});
    const NoveltyVerdict want{new_edges, new_buckets,
                              new_edges + new_buckets > 0};
    if (map.Observe(t) != want) {
      return {false, absl::StrCat("verdict differs on trace ", i)};
    }
    interesting += want.is_interesting;
  }
  return {true, absl::StrCat("1000 traces agree, ", interesting, " interesting")};
}

Outcome Suite::P5() {
  absl::StatusOr<CampaignStats> a = RunCampaign(Chunkfmt("p5_a"));
  absl::StatusOr<CampaignStats> b = RunCampaign(Chunkfmt("p5_b"));
  if (!a.ok() || !b.ok()) return {false, "campaign failed"};
  const auto sa = Snapshot(work_ / "p5_a");
  const auto sb = Snapshot(work_ / "p5_b");
  if (sa != sb) return {false, "archives differ"};
  return {a->rows == b->rows,
          absl::StrCat(sa.size(), " files identical, queue ",
                       a->final.admitted_llm_direct +
                           a->final.admitted_llm_descendant +
                           a->final.admitted_other,
                       " seeds")};
}

Outcome Suite::P6() {
  CampaignConfig c = Chunkfmt("p6");
  c.llm_enabled = true;
  c.endpoint = "inproc:stub";
  c.deterministic = false;
  if (!RunCampaign(c).ok()) return {false, "campaign failed"};
  absl::StatusOr<RunArchive> archive = LoadRunArchive(c.out_dir);
  if (!archive.ok()) return {false, std::string(archive.status().message())};

  DatasetOptions opts;  // 4096 gate, 10% noise
  absl::StatusOr<DatasetResult> built = BuildPairs({&*archive, 1}, opts);
  if (!built.ok()) return {false, std::string(built.status().message())};
  const fs::path jsonl = work_ / "p6_pairs.jsonl";
  if (!ExportPairs(jsonl, built->pairs).ok()) return {false, "export failed"};
  absl::StatusOr<std::vector<FinetunePair>> pairs = ImportPairs(jsonl);
  if (!pairs.ok()) return {false, std::string(pairs.status().message())};

  // Criteria recomputed from the raw traces alone.
  std::multimap<std::pair<std::string, std::string>, std::vector<Criterion>>
      expected;
  CoverageMap map;
  for (const ArchivedSeed& s : archive->seeds) {
    const NoveltyVerdict v = map.Observe(s.trace);
    if (!s.meta.parent_id.has_value()) continue;
    std::vector<Criterion> want;
    if (v.new_edges > 0) {
      want.push_back(Criterion::kNewPath);
    } else if (v.new_buckets > 0) {
      want.push_back(Criterion::kHitcountChange);
    }
    if (s.trace.count(chunkfmt::kBugB1) + s.trace.count(chunkfmt::kBugB2) +
            s.trace.count(chunkfmt::kBugB3) >
        0) {
      want.push_back(Criterion::kCrash);
    }
    const ArchivedSeed* parent = archive->Find(*s.meta.parent_id);
    if (parent == nullptr) continue;
    expected.emplace(std::make_pair(EncodeHex(parent->payload),
                                    EncodeHex(s.payload)),
                     want);
  }
  size_t real = 0;
  for (const FinetunePair& p : *pairs) {
    if (p.original_hex.size() + p.mutated_hex.size() > 4096) {
      return {false, "pair exceeds the 4096 hex gate"};
    }
    if (p.is_noise) continue;
    ++real;
    if (p.criteria.empty()) return {false, "real pair without criteria"};
    auto [lo, hi] = expected.equal_range({p.original_hex, p.mutated_hex});
    const bool ok = std::any_of(lo, hi, [&](const auto& kv) {
      return kv.second == p.criteria;
    });
    if (!ok) return {false, "pair criteria not reproduced from traces"};
  }
  return {real > 0,
          absl::StrCat(real, " real and ", pairs->size() - real,
                       " noise pairs audited, ", built->skipped_gate,
                       " gated, ", archive->seeds.size(), " seeds")};
}

Outcome Suite::P7() {
  Rng rng(7);
  Corpus corpus;
  std::map<SeedId, std::pair<Origin, std::optional<SeedId>>> table;
  for (SeedId id = 1; id <= 10000; ++id) {
    Seed s;
    s.id = id;
    if (id <= 5) {
      s.origin = Origin::kInitial;
    } else {
      s.origin = rng.OneIn(12) ? Origin::kLlm : Origin::kClassic;
      // Prefer recent parents so chains get deep.
      const size_t n = corpus.size();
      const size_t back = rng.OneIn(2) ? rng.Below(std::min<size_t>(n, 20))
                                       : rng.Below(n);
      s.parent_id = corpus.seeds()[n - 1 - back].id;
    }
    table[id] = {s.origin, s.parent_id};
    if (!corpus.Admit(std::move(s), NoveltyVerdict{1, 1, true}).ok()) {
      return {false, "admit failed"};
    }
  }
  std::map<Lineage, size_t> counts;
  for (const auto& [id, entry] : table) {
    absl::StatusOr<Lineage> got = corpus.LineageOrigin(id);
    const Lineage want = WalkLineage(table, id);
    if (!got.ok() || *got != want) {
      return {false, absl::StrCat("seed ", id, " lineage differs")};
    }
    ++counts[want];
  }
  return {true, absl::StrCat("10000 seeds agree: direct=",
                             counts[Lineage::kLlmDirect], " descendant=",
                             counts[Lineage::kLlmDescendant], " other=",
                             counts[Lineage::kNonLlm])};
}

Outcome Suite::P8() {
  struct Arm {
    int b1 = 0, b2 = 0;
    std::vector<double> edges;
    double slowest = 0;
  };
  Arm havoc, stub;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    for (bool llm : {false, true}) {
      CampaignConfig c;
      c.target = "chunkfmt";
      c.corpus_dirs = {work_ / "campaign_seeds"};
      c.out_dir = work_ / absl::StrCat("p8_", seed, llm ? "_stub" : "_havoc");
      c.max_execs = 200000;
      c.rng_seed = seed;
      c.deterministic = false;
      c.llm_enabled = llm;
      c.endpoint = "inproc:stub";
      c.stats_interval_s = 10;
      absl::StatusOr<CampaignStats> s = RunCampaign(c);
      if (!s.ok()) return {false, std::string(s.status().message())};
      Arm& arm = llm ? stub : havoc;
      arm.b1 += s->crash_reasons.contains("B1");
      arm.b2 += s->crash_reasons.contains("B2");
      arm.edges.push_back(static_cast<double>(s->final.edges_seen));
      arm.slowest = std::max(arm.slowest, s->wall_seconds);
      if (llm && seed == 1) p8_stub_run_ = c.out_dir;
    }
  }
  const double mh = Median(havoc.edges), ms = Median(stub.edges);
  const bool a = stub.b1 >= 4 && stub.b2 >= 4 && havoc.b1 <= 1;
  const bool b = ms > mh && ms >= 1.10 * mh;
  const bool t = std::max(havoc.slowest, stub.slowest) < 60;
  return {a && b && t,
          absl::StrFormat("stub B1=%d/5 B2=%d/5, havoc B1=%d/5; median edges "
                          "stub=%.0f havoc=%.0f (+%.1f%%, need 10%%); "
                          "slowest run %.1fs",
                          stub.b1, stub.b2, havoc.b1, ms, mh,
                          100 * (ms - mh) / mh,
                          std::max(havoc.slowest, stub.slowest))};
}

Outcome Suite::P9() {
  if (p8_stub_run_.empty()) return {false, "no stub run available"};
  absl::StatusOr<std::vector<ReportRow>> report = ReportCoverage(p8_stub_run_);
  if (!report.ok() || report->empty()) return {false, "report failed"};
  absl::StatusOr<RunArchive> archive = LoadRunArchive(p8_stub_run_);
  if (!archive.ok()) return {false, "archive unreadable"};
  std::map<SeedId, std::pair<Origin, std::optional<SeedId>>> table;
  for (const ArchivedSeed& s : archive->seeds) {
    table[s.meta.id] = {s.meta.origin, s.meta.parent_id};
  }
  std::map<Lineage, size_t> counts;
  for (const auto& [id, entry] : table) ++counts[WalkLineage(table, id)];
  const ReportRow& last = report->back();
  const bool ok = last.admitted_llm_direct >= 1 &&
                  last.admitted_llm_direct == counts[Lineage::kLlmDirect] &&
                  last.admitted_llm_descendant ==
                      counts[Lineage::kLlmDescendant] &&
                  last.admitted_other == counts[Lineage::kNonLlm];
  return {ok, absl::StrCat("report llm_direct=", last.admitted_llm_direct,
                           " llm_descendant=", last.admitted_llm_descendant,
                           " other=", last.admitted_other, "; walk ",
                           counts[Lineage::kLlmDirect], "/",
                           counts[Lineage::kLlmDescendant], "/",
                           counts[Lineage::kNonLlm])};
}

}  // namespace
}  // namespace structfuzz

// Optional arguments name the criteria to run, e.g. `acceptance_test P5 P8`.
int main(int argc, char** argv) {
  using structfuzz::Outcome;
  using structfuzz::Suite;
  const std::filesystem::path work = structfuzz::MakeWorkDir();
  Suite suite(work);
  const std::pair<const char*, Outcome (Suite::*)()> criteria[] = {
      {"P1 hex round trip", &Suite::P1},
      {"P2 bounded queue recency", &Suite::P2},
      {"P3 non-blocking channel", &Suite::P3},
      {"P4 coverage oracle", &Suite::P4},
      {"P5 deterministic replay", &Suite::P5},
      {"P6 dataset audit", &Suite::P6},
      {"P7 lineage oracle", &Suite::P7},
      {"P8 structure-aware advantage", &Suite::P8},
      {"P9 provenance report", &Suite::P9},
  };
  int failed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    bool wanted = argc == 1;
    for (int i = 1; i < argc; ++i) {
      wanted |= std::string(name).rfind(argv[i], 0) == 0;
    }
    // P9 inspects a run produced by P8.
    if (!wanted) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = (suite.*fn)();
    const double s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    std::printf("%s %-30s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::filesystem::remove_all(work);
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}

// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/bench.hpp"

#include <chrono>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>

#include "spk/benchsrc.hpp"
#include "spk/parser.hpp"

namespace spk {

QuadFit quadFit(const std::vector<std::pair<double, double>>& points) {
  // Normal equations for [c, b, a] over basis {1, x, x^2}.
  double s[5] = {0, 0, 0, 0, 0};
  double r[3] = {0, 0, 0};
  for (auto [x, y] : points) {
    double px = 1;
    for (int k = 0; k <= 4; ++k) {
      s[k] += px;
      if (k <= 2) r[k] += px * y;
      px *= x;
    }
  }
  double A[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  auto det3 = [](double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  double d = det3(A);
  if (d == 0) return {};
  QuadFit fit;
  double out[3];
  for (int col = 0; col < 3; ++col) {
    double M[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M[i][j] = j == col ? r[i] : A[i][j];
    }
    out[col] = det3(M) / d;
  }
  fit.c = out[0];
  fit.b = out[1];
  fit.a = out[2];
  return fit;
}

std::vector<std::uint8_t> benchInputs(const std::string& suite, std::int64_t size,
                                      std::int64_t wbits, std::uint64_t seed) {
  // One stream per (suite, size): deterministic and documented in the output.
  std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(size) << 32) ^
                      (suite == "mst" ? 0x9e3779b97f4a7c15ull : 0));
  std::int64_t count = suite == "mst" ? size * (size - 1) / 2 : size;
  std::vector<std::int64_t> values;
  values.reserve(count);
  std::int64_t mask = (std::int64_t(1) << wbits) - 1;
  for (std::int64_t i = 0; i < count; ++i) {
    values.push_back(static_cast<std::int64_t>(rng()) & mask);
  }
  return packUints(values, wbits);
}

namespace {

BenchRecord runOne(const BenchConfig& config, std::int64_t size, Mode mode) {
  auto t0 = std::chrono::steady_clock::now();
  std::string srcText = config.suite == "mst" ? mstSource(size, config.wbits)
                                              : makespanSource(size, config.wbits);
  std::string paramText = config.suite == "mst" ? mstParams(size, config.wbits)
                                                : makespanParams(size, config.wbits);
  SourceProgram prog = resolve(parseSource(srcText), parseParams(paramText));
  AsmProgram asmProg = lower(prog);
  SbTree tree = buildSbTree(asmProg);

  BuildOptions opt;
  opt.mode = mode;
  opt.inputMode = InputMode::Free;
  opt.inputValues = benchInputs(config.suite, size, config.wbits, config.seed);
  LpModel model = build(asmProg, tree, opt);

  BenchRecord rec;
  rec.bench = config.suite;
  rec.size = size;
  rec.mode = modeName(mode);
  LpStats st = stats(model);
  rec.tb = st.tb;
  rec.rows = st.rows;
  rec.cols = st.cols;
  rec.nonzeros = st.nonzeros;

  if (!config.solveWith.empty()) {
    std::string path = "/tmp/spkc_bench_" + rec.bench + "_" + std::to_string(size) + "_" +
                       rec.mode + ".lp";
    {
      FileSink sink(path);
      writeLp(model, sink);
      rec.bytes = sink.bytes;
    }
    std::string cmd = config.solveWith + " " + path + " 2>/dev/null";
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
      char buf[512];
      std::string out;
      while (fgets(buf, sizeof(buf), pipe)) out += buf;
      pclose(pipe);
      while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
      std::size_t nl = out.find_last_of('\n');
      rec.solver = nl == std::string::npos ? out : out.substr(nl + 1);
    }
    std::remove(path.c_str());
  } else {
    CountingSink sink;
    writeLp(model, sink);
    rec.bytes = sink.bytes;
  }

  auto t1 = std::chrono::steady_clock::now();
  rec.ms = config.zeroTime
               ? 0
               : std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  return rec;
}

}  // namespace

BenchResult runBench(const BenchConfig& config) {
  struct Job {
    std::int64_t size;
    Mode mode;
  };
  std::vector<Job> jobs;
  for (std::int64_t size : config.sizes) {
    for (Mode mode : config.modes) jobs.push_back({size, mode});
  }

  BenchResult result;
  result.seed = config.seed;
  result.records.resize(jobs.size());
  std::mutex mu;
  std::size_t nextJob = 0;
  auto worker = [&] {
    while (true) {
      std::size_t j;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (nextJob >= jobs.size()) return;
        j = nextJob++;
      }
      result.records[j] = runOne(config, jobs[j].size, jobs[j].mode);
    }
  };
  int nWorkers = std::max(1, std::min<int>(config.jobs, static_cast<int>(jobs.size())));
  if (nWorkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nWorkers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const BenchRecord& x, const BenchRecord& y) {
              if (x.bench != y.bench) return x.bench < y.bench;
              if (x.size != y.size) return x.size < y.size;
              return x.mode < y.mode;
            });

  std::vector<std::pair<double, double>> uoPts, hsbPts;
  for (const auto& r : result.records) {
    (r.mode == "uo" ? uoPts : hsbPts)
        .push_back({static_cast<double>(r.size), static_cast<double>(r.nonzeros)});
  }
  // Self-comparison when only one mode was requested.
  if (uoPts.empty()) uoPts = hsbPts;
  if (hsbPts.empty()) hsbPts = uoPts;
  if (uoPts.size() >= 3) result.fitUo = quadFit(uoPts);
  if (hsbPts.size() >= 3) result.fitHsb = quadFit(hsbPts);
  if (result.fitHsb.a != 0) result.leadingRatio = result.fitUo.a / result.fitHsb.a;
  result.solved = !config.solveWith.empty();
  return result;
}

std::string benchCsv(const BenchResult& result) {
  std::string out = "bench,size,mode,tb,rows,cols,nonzeros,bytes,ms\n";
  for (const auto& r : result.records) {
    out += r.bench + "," + std::to_string(r.size) + "," + r.mode + "," + std::to_string(r.tb) +
           "," + std::to_string(r.rows) + "," + std::to_string(r.cols) + "," +
           std::to_string(r.nonzeros) + "," + std::to_string(r.bytes) + "," +
           std::to_string(r.ms) + "\n";
  }
  return out;
}

namespace {

std::string kilo(std::int64_t v) {
  if (v < 10000) return std::to_string(v);
  return std::to_string((v + 500) / 1000) + "k";
}

}  // namespace

std::string benchMarkdown(const BenchResult& result) {
  std::string out;
  out += "| bench | size | mode | TB | rows | cols | nonzeros | bytes | ms |";
  if (result.solved) out += " solver |";
  out += "\n";
  out += "|---|---|---|---|---|---|---|---|---|";
  if (result.solved) out += "---|";
  out += "\n";
  for (const auto& r : result.records) {
    out += "| " + r.bench + " | " + std::to_string(r.size) + " | " + r.mode + " | " +
           std::to_string(r.tb) + " | " + kilo(r.rows) + " | " + kilo(r.cols) + " | " +
           kilo(r.nonzeros) + " | " + std::to_string(r.bytes) + " | " + std::to_string(r.ms) +
           " |";
    if (result.solved) out += " " + (r.solver.empty() ? std::string("-") : r.solver) + " |";
    out += "\n";
  }
  out += "\nseed = " + std::to_string(result.seed) + "\n";

  // Per-size reduction ratios.
  for (std::size_t i = 0; i + 1 < result.records.size(); ++i) {
    const auto& a = result.records[i];
    const auto& b = result.records[i + 1];
    if (a.bench == b.bench && a.size == b.size && a.mode == "hsb" && b.mode == "uo" &&
        b.nonzeros > 0) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "nonzeros(hsb)/nonzeros(uo) at %s %lld: %.4f\n",
                    a.bench.c_str(), static_cast<long long>(a.size),
                    static_cast<double>(a.nonzeros) / static_cast<double>(b.nonzeros));
      out += buf;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "quadratic fit of nonzeros: uo a=%.1f, hsb a=%.1f, leading-coefficient ratio "
                "uo/hsb = %.2f\n",
                result.fitUo.a, result.fitHsb.a, result.leadingRatio);
  out += buf;
  return out;
}

}  // namespace spk

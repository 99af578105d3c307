// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spk/bench.hpp"
#include "spk/benchsrc.hpp"
#include "spk/parser.hpp"
#include "spk/witness.hpp"

namespace {

using namespace spk;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError(ErrKind::Usage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> parseBits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw CompileError(ErrKind::Usage, "input bitstring must contain only 0 and 1");
    }
    out.push_back(c == '1');
  }
  return out;
}

struct Pipeline {
  SourceProgram source;
  AsmProgram prog;
  SbTree tree;
};

Pipeline compileFiles(const std::string& srcPath, const std::string& paramPath) {
  Pipeline p;
  ParamMap params = paramPath.empty() ? ParamMap{} : parseParams(slurp(paramPath));
  p.source = resolve(parseSource(slurp(srcPath)), params);
  p.prog = lower(p.source);
  p.tree = buildSbTree(p.prog);
  return p;
}

Mode parseMode(const std::string& s) {
  if (s == "uo") return Mode::UO;
  if (s == "hsb") return Mode::HSB;
  throw CompileError(ErrKind::Usage, "mode must be 'uo' or 'hsb'");
}

std::vector<std::string> blockNames(const SbTree& tree, const AsmProgram& prog) {
  std::vector<std::string> names(tree.nodes.size());
  for (const auto& n : tree.nodes) names[n.index] = n.name;
  std::vector<std::string> perBlock(names.size());
  (void)prog;
  return names;
}

int cmdCompile(const std::string& srcPath, const std::string& paramPath, const std::string& out,
               const std::string& modeStr, const std::string& format, std::int64_t tb,
               const std::string& fixInputs, const std::string& inputs, bool emitAsm,
               bool emitSbtree, const std::string& emitEtis) {
  Mode mode = parseMode(modeStr);
  if (tb > 0 && mode != Mode::UO) {
    throw CompileError(ErrKind::Usage, "--tb applies to --mode uo only");
  }
  if (!fixInputs.empty() && !inputs.empty()) {
    throw CompileError(ErrKind::Usage, "--fix-inputs and --inputs are mutually exclusive");
  }
  Pipeline p = compileFiles(srcPath, paramPath);

  if (emitAsm) std::cout << listing(p.prog, blockNames(p.tree, p.prog));
  if (emitSbtree) {
    std::cout << emitSbTreeText(p.tree);
    std::cout << emitSbTreeJson(p.tree) << "\n";
  }
  if (!emitEtis.empty()) {
    std::int32_t block = p.tree.findByName(emitEtis);
    if (block < 0 || !p.tree.node(block).flat()) {
      throw CompileError(ErrKind::Usage, "unknown flat block '" + emitEtis + "'");
    }
    Etig gen(p.tree, block);
    while (auto iv = gen.next()) {
      std::string j = "J=(";
      for (std::size_t i = 0; i < iv->iter.size(); ++i) {
        if (i) j += ",";
        j += std::to_string(iv->iter[i]);
      }
      j += ")";
      std::cout << j << ": (" << iv->start << ", " << iv->end << "]\n";
    }
  }

  BuildOptions opt;
  opt.mode = mode;
  opt.tbOverride = tb;
  if (!fixInputs.empty()) {
    opt.inputMode = InputMode::Fixed;
    opt.inputValues = parseBits(fixInputs);
  } else if (!inputs.empty()) {
    opt.inputMode = InputMode::Free;
    opt.inputValues = parseBits(inputs);
  }
  LpModel model = build(p.prog, p.tree, opt);
  {
    FileSink sink(out);
    if (format == "lp") {
      writeLp(model, sink);
    } else if (format == "mps") {
      writeMps(model, sink);
    } else {
      throw CompileError(ErrKind::Usage, "format must be 'lp' or 'mps'");
    }
  }
  std::cout << statsJson(stats(model)) << "\n";
  return 0;
}

int cmdStats(const std::string& srcPath, const std::string& paramPath, const std::string& modeStr,
             std::int64_t tb) {
  Mode mode = parseMode(modeStr);
  if (tb > 0 && mode != Mode::UO) {
    throw CompileError(ErrKind::Usage, "--tb applies to --mode uo only");
  }
  Pipeline p = compileFiles(srcPath, paramPath);
  BuildOptions opt;
  opt.mode = mode;
  opt.tbOverride = tb;
  LpModel model = build(p.prog, p.tree, opt);
  std::cout << statsJson(stats(model)) << "\n";
  return 0;
}

int cmdRun(const std::string& srcPath, const std::string& paramPath, const std::string& input,
           const std::string& semantics, std::int64_t tb) {
  Pipeline p = compileFiles(srcPath, paramPath);
  Semantics sem = semantics == "plain" ? Semantics::Plain : Semantics::Barrier;
  Trace tr = run(p.prog, p.tree, parseBits(input), sem, tb);
  std::string outBits;
  for (auto b : tr.outputs) outBits += b ? '1' : '0';
  std::cout << "{\"outputs\":\"" << outBits << "\",\"completionStep\":" << tr.completionStep
            << ",\"tb\":" << tr.tb << "}\n";
  return 0;
}

int cmdCheck(const std::string& srcPath, const std::string& paramPath, const std::string& input,
             const std::string& modeStr, std::int64_t tb, bool mutate) {
  Mode mode = parseMode(modeStr);
  Pipeline p = compileFiles(srcPath, paramPath);
  BuildOptions opt;
  opt.mode = mode;
  opt.tbOverride = mode == Mode::UO ? tb : 0;
  opt.inputMode = InputMode::Free;
  opt.inputValues = parseBits(input);
  if (tb > 0 && mode != Mode::UO) {
    throw CompileError(ErrKind::Usage, "--tb applies to --mode uo only");
  }
  LpModel model = build(p.prog, p.tree, opt);
  Trace tr = run(p.prog, p.tree, opt.inputValues,
                 mode == Mode::UO ? Semantics::Plain : Semantics::Barrier, opt.tbOverride);
  Witness w = makeWitness(tr, model);
  if (mutate) mutateWitness(w, model);
  CheckReport rep = checkFeasible(model, w);
  std::cout << rep.text();
  std::cout << rep.json() << "\n";
  return rep.feasible ? 0 : 1;
}

int cmdGen(const std::string& suite, std::int64_t size, std::int64_t wbits,
           const std::string& outSrc, const std::string& outParams) {
  std::string src, params;
  if (suite == "makespan") {
    src = makespanSource(size, wbits);
    params = makespanParams(size, wbits);
  } else if (suite == "mst") {
    src = mstSource(size, wbits);
    params = mstParams(size, wbits);
  } else {
    throw CompileError(ErrKind::Usage, "suite must be 'makespan' or 'mst'");
  }
  std::ofstream s(outSrc), q(outParams);
  if (!s || !q) throw CompileError(ErrKind::Usage, "cannot write output files");
  s << src;
  q << params;
  return 0;
}

int cmdBench(const std::string& suite, const std::string& sizesStr, const std::string& modesStr,
             std::int64_t wbits, std::uint64_t seed, const std::string& csvPath,
             const std::string& mdPath, const std::string& solveWith, int jobs, bool noTime) {
  BenchConfig config;
  config.suite = suite;
  if (suite != "makespan" && suite != "mst") {
    throw CompileError(ErrKind::Usage, "suite must be 'makespan' or 'mst'");
  }
  {
    std::stringstream ss(sizesStr);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) config.sizes.push_back(std::stoll(item));
    }
  }
  if (config.sizes.empty()) throw CompileError(ErrKind::Usage, "no sizes given");
  config.modes.clear();
  {
    std::stringstream ss(modesStr);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) config.modes.push_back(parseMode(item));
    }
  }
  if (config.modes.empty()) throw CompileError(ErrKind::Usage, "no modes given");
  config.wbits = wbits;
  config.seed = seed;
  config.jobs = jobs;
  config.solveWith = solveWith;
  config.zeroTime = noTime;

  BenchResult result = runBench(config);
  std::string csv = benchCsv(result);
  std::string md = benchMarkdown(result);
  if (!csvPath.empty()) {
    std::ofstream out(csvPath);
    out << csv;
  } else {
    std::cout << csv;
  }
  if (!mdPath.empty()) {
    std::ofstream out(mdPath);
    out << md;
  }
  std::cout << md;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spkc: compiles a small imperative modeling language into linear programs "
               "whose 0/1 solutions encode program executions"};
  app.require_subcommand(1);

  std::string srcPath, paramPath, out = "out.lp", mode = "hsb", format = "lp";
  std::string fixInputs, inputs, emitEtis, input, semantics = "plain";
  std::int64_t tb = 0;
  bool emitAsm = false, emitSbtree = false, mutate = false;

  auto* compile = app.add_subcommand("compile", "compile a program to an LP file");
  compile->add_option("source", srcPath)->required();
  compile->add_option("params", paramPath)->required();
  compile->add_option("-o,--output", out, "output path (default out.lp)");
  compile->add_option("--mode", mode, "uo | hsb (default hsb)");
  compile->add_option("--format", format, "lp | mps");
  compile->add_option("--tb", tb, "custom time bound (uo only)");
  compile->add_option("--fix-inputs", fixInputs, "pin inputs to this bitstring");
  compile->add_option("--inputs", inputs, "encode inputs via the objective");
  compile->add_flag("--emit-asm", emitAsm, "print the lowered instruction listing");
  compile->add_flag("--emit-sbtree", emitSbtree, "print the block tree (text + JSON)");
  compile->add_option("--emit-etis", emitEtis, "print the ETIs of one flat block");

  auto* statsCmd = app.add_subcommand("stats", "compile and print LP size stats only");
  statsCmd->add_option("source", srcPath)->required();
  statsCmd->add_option("params", paramPath)->required();
  statsCmd->add_option("--mode", mode);
  statsCmd->add_option("--tb", tb);

  auto* runCmd = app.add_subcommand("run", "run the reference interpreter");
  runCmd->add_option("source", srcPath)->required();
  runCmd->add_option("params", paramPath)->required();
  runCmd->add_option("--input", input, "input bitstring")->required();
  runCmd->add_option("--semantics", semantics, "plain | barrier");
  runCmd->add_option("--tb", tb, "step budget (plain only)");

  auto* check = app.add_subcommand("check", "compile, run, build the witness, verify");
  check->add_option("source", srcPath)->required();
  check->add_option("params", paramPath)->required();
  check->add_option("--input", input, "input bitstring")->required();
  check->add_option("--mode", mode);
  check->add_option("--tb", tb);
  check->add_flag("--mutate", mutate, "flip one witness entry (negative test)");

  std::string suite, sizes = "5,10,20", modes = "uo,hsb", csvPath, mdPath, solveWith;
  std::string genSrcOut = "bench.spk", genParamsOut = "bench.params";
  std::int64_t wbits = 2, genSize = 5;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool noTime = false;

  auto* bench = app.add_subcommand("bench", "built-in benchmark harness");
  bench->add_option("--suite", suite, "makespan | mst")->required();
  bench->add_option("--sizes", sizes, "comma-separated sizes");
  bench->add_option("--modes", modes, "comma-separated modes");
  bench->add_option("--wbits", wbits, "weight bit width");
  bench->add_option("--seed", seed, "input weight seed (recorded in the output)");
  bench->add_option("--csv", csvPath, "write the CSV here instead of stdout");
  bench->add_option("--md", mdPath, "also write the markdown table here");
  bench->add_option("--solve-with", solveWith, "external solver command, receives the LP path");
  bench->add_option("--jobs", jobs, "worker pool size");
  bench->add_flag("--no-time", noTime, "zero the ms column (byte-reproducible output)");

  auto* gen = app.add_subcommand("gen", "write a built-in benchmark's source and params");
  gen->add_option("--suite", suite)->required();
  gen->add_option("--size", genSize)->required();
  gen->add_option("--wbits", wbits);
  gen->add_option("--out-src", genSrcOut);
  gen->add_option("--out-params", genParamsOut);

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) {
      if (out == "out.lp" && format == "mps") out = "out.mps";
      return cmdCompile(srcPath, paramPath, out, mode, format, tb, fixInputs, inputs, emitAsm,
                        emitSbtree, emitEtis);
    }
    if (statsCmd->parsed()) return cmdStats(srcPath, paramPath, mode, tb);
    if (runCmd->parsed()) return cmdRun(srcPath, paramPath, input, semantics, tb);
    if (check->parsed()) return cmdCheck(srcPath, paramPath, input, mode, tb, mutate);
    if (bench->parsed()) {
      return cmdBench(suite, sizes, modes, wbits, seed, csvPath, mdPath, solveWith, jobs, noTime);
    }
    if (gen->parsed()) return cmdGen(suite, genSize, wbits, genSrcOut, genParamsOut);
  } catch (const spk::CompileError& e) {
    std::cerr << "spkc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spkc: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

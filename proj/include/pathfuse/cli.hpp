// Copyright 2026 The PathFuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// `pathfuse` command-line driver. Exit status: 0 success, 1 validation or
// tolerance failure, 2 usage, I/O or input-format errors. Diagnostics go to
// `err`; data goes to files (-o) or `out`.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathfuse/cad_path.hpp"
#include "pathfuse/config.hpp"
#include "pathfuse/demo_capture.hpp"
#include "pathfuse/error.hpp"
#include "pathfuse/fused_path.hpp"
#include "pathfuse/fusion.hpp"
#include "pathfuse/pathml.hpp"
#include "pathfuse/program_gen.hpp"

namespace pathfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  f << data;
  if (!f) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

inline std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (detail::trim(text).empty()) return out;
  for (const auto cell : detail::split(text, ',')) {
    const auto v = detail::parse_double(cell);
    if (!v) throw Error(ErrorKind::argument, std::string(what) + ": '" + text + "' is not a number list");
    out.push_back(*v);
  }
  return out;
}

/// --config, else $PATHFUSE_CONFIG, else built-in defaults.
inline PipelineConfig load_config(const std::string& path) {
  std::string p = path;
  if (p.empty()) {
    if (const char* env = std::getenv("PATHFUSE_CONFIG")) p = env;
  }
  if (p.empty()) return {};
  return parse_config(read_file(p));
}

struct Options {
  // synth
  std::string truth;
  double rate = 100.0;
  TrackerErrorModel model;
  bool zero_noise = false;
  // fuse
  std::string cad, demo, calib;
  // pathml gen
  std::string fused, process, project;
  std::optional<double> glue_flow, wire_feed, layer_height;
  std::vector<std::string> extras;
  // pathml validate / expand / emit
  std::string input;
  int layers = 1;
  std::string direction = "0,0,1";
  // report
  std::string executed, nominal, sections;
  std::optional<double> tolerance;
  // shared
  std::string config;
  std::string output;
};

inline int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  const FusedPath truth = parse_fused_json(read_file(o.truth));
  TrackerErrorModel model = o.model;
  if (o.zero_noise) {
    const auto seed = model.seed;
    model = TrackerErrorModel::none();
    model.seed = seed;
  }
  const PoseSeries demo = synth_demo(truth, model, o.rate);
  write_output(o.output, write_demo(demo), out);
  err << "synth: " << demo.size() << " samples\n";
  return kExitOk;
}

inline int cmd_fuse(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_config(o.config);
  CadPath cad = parse_cad(read_file(o.cad));
  if (cfg.resample_spacing) {
    const ResampleResult r = resample_cad(cad, *cfg.resample_spacing);
    if (r.spacing_exceeds_length) err << "fuse: warning: resample spacing exceeds path length\n";
    cad = r.path;
  }
  const PoseSeries raw = parse_demo(read_file(o.demo), o.demo);
  const CalibrationSet calib = parse_calibration(read_file(o.calib));
  const PoseSeries filtered = filter_outliers(raw, cfg.filter_window, cfg.filter_k);
  const PoseSeries reduced =
      downsample(filtered, cfg.downsample_count(cad.waypoints.size(), filtered.size()));
  const FusionResult fused = fuse(cad, reduced);
  if (fused.time_fallback) {
    err << "fuse: warning: demonstration travel < 1 mm, matched by normalized time\n";
  }
  write_output(o.output, write_fused_json(to_robot_frame(fused.path, calib)), out);
  return kExitOk;
}

inline int cmd_pathml_gen(const Options& o, std::ostream& out, std::ostream&) {
  const PipelineConfig cfg = load_config(o.config);
  const FusedPath path = parse_fused_json(read_file(o.fused));
  ProcessParameters pp = cfg.process.value_or(ProcessParameters{});
  if (!o.process.empty()) {
    const auto t = process_type_from_string(o.process);
    if (!t) throw Error(ErrorKind::argument, "--process must be adhesive, welding or other");
    pp.process_type = *t;
  }
  if (o.glue_flow) pp.glue_flow_rate = *o.glue_flow;
  if (o.wire_feed) pp.wire_feed_rate = *o.wire_feed;
  if (o.layer_height) pp.layer_height = *o.layer_height;
  for (const std::string& kv : o.extras) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::argument, "--extra expects key=value, got '" + kv + "'");
    }
    pp.extra.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::string project = o.project.empty() ? cfg.project : o.project;
  write_output(o.output, write_xml(build_document(path, pp, project)), out);
  return kExitOk;
}

inline int cmd_pathml_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_config(o.config);
  const PathMLDocument doc = parse_xml(read_file(o.input), ParseMode::lenient);
  std::size_t count = 0;
  for (const DocumentViolation& v : validate_document(doc)) {
    out << v.to_string() << "\n";
    ++count;
  }
  if (count == 0 && cfg.limits) {
    for (const LimitViolation& v : validate_path(doc, *cfg.limits).violations) {
      out << format_violation(doc, v) << "\n";
      ++count;
    }
  }
  err << "pathml validate: " << count << " violation(s)\n";
  return count == 0 ? kExitOk : kExitFailed;
}

inline int cmd_pathml_expand(const Options& o, std::ostream& out, std::ostream&) {
  PathMLDocument doc = parse_xml(read_file(o.input));
  if (o.layer_height) doc.process.layer_height = *o.layer_height;
  const auto dir = parse_number_list(o.direction, "--direction");
  if (dir.size() != 3) throw Error(ErrorKind::argument, "--direction needs 3 components");
  write_output(o.output, write_xml(expand_layers(doc, o.layers, {dir[0], dir[1], dir[2]})), out);
  return kExitOk;
}

inline int cmd_emit(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_config(o.config);
  const PathMLDocument doc = parse_xml(read_file(o.input));
  std::optional<ValidationReport> report;
  if (cfg.limits) {
    report = validate_path(doc, *cfg.limits);
    if (!report->passed) {
      for (const LimitViolation& v : report->violations) {
        err << "emit: " << format_violation(doc, v) << "\n";
      }
      err << "emit: path failed validation, no program written\n";
      return kExitFailed;
    }
  }
  write_output(o.output, emit_program(doc, report ? &*report : nullptr).text(), out);
  return kExitOk;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = load_config(o.config);
  const FusedPath executed = parse_fused_json(read_file(o.executed));
  const FusedPath nominal = parse_fused_json(read_file(o.nominal));
  const auto breaks = parse_number_list(o.sections, "--sections");
  const DeviationReport r =
      deviation_report(executed, nominal, breaks, o.tolerance.value_or(cfg.tolerance));
  write_output(o.output, write_report_json(r), out);
  err << "report: overall max " << detail::format_fixed(r.overall_max, 3) << " mm, tolerance "
      << detail::format_fixed(r.tolerance, 3) << " mm\n";
  return r.within_tolerance ? kExitOk : kExitFailed;
}

/// Runs one invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"pathfuse: demonstration + CAD fusion, PathML and robot programs", "pathfuse"};
  app.require_subcommand(1);
  Options o;
  int (*handler)(const Options&, std::ostream&, std::ostream&) = nullptr;
  const auto bind = [&](CLI::App* sub, int (*fn)(const Options&, std::ostream&, std::ostream&)) {
    sub->callback([&handler, fn] { handler = fn; });
  };

  auto* synth = app.add_subcommand("synth", "synthesize a tracker stream from a truth path");
  synth->add_option("--truth", o.truth, "truth path (fused JSON, frame S)")->required();
  synth->add_option("--rate", o.rate, "sample rate, Hz")->capture_default_str();
  synth->add_option("--z-bias-max", o.model.z_bias_max, "mm")->capture_default_str();
  synth->add_option("--z-bias-range", o.model.z_bias_range, "mm")->capture_default_str();
  synth->add_option("--xy-noise", o.model.xy_noise_sigma, "sigma, mm")->capture_default_str();
  synth->add_option("--orient-noise", o.model.orient_noise_sigma, "sigma, degrees")->capture_default_str();
  synth->add_option("--spike-rate", o.model.spike_rate, "per-sample probability")->capture_default_str();
  synth->add_option("--spike-magnitude", o.model.spike_magnitude, "mm")->capture_default_str();
  synth->add_option("--seed", o.model.seed)->capture_default_str();
  synth->add_flag("--zero-noise", o.zero_noise, "disable every error term");
  synth->add_option("-o,--output", o.output, "demo CSV");
  bind(synth, cmd_synth);

  auto* fuse_cmd = app.add_subcommand("fuse", "fuse CAD positions with a demonstration");
  fuse_cmd->add_option("--cad", o.cad, "CAD path (CSV or JSON)")->required();
  fuse_cmd->add_option("--demo", o.demo, "demonstration CSV")->required();
  fuse_cmd->add_option("--calib", o.calib, "calibration JSON")->required();
  fuse_cmd->add_option("--config", o.config, "pipeline config JSON");
  fuse_cmd->add_option("-o,--output", o.output, "fused path JSON (frame R)");
  bind(fuse_cmd, cmd_fuse);

  auto* pathml_cmd = app.add_subcommand("pathml", "PathML documents");
  pathml_cmd->require_subcommand(1);
  auto* gen = pathml_cmd->add_subcommand("gen", "build a PathML document from a fused path");
  gen->add_option("--fused", o.fused, "fused path JSON (frame R)")->required();
  gen->add_option("--process", o.process, "adhesive | welding | other");
  gen->add_option("--glue-flow", o.glue_flow, "glue flow rate, ml/min");
  gen->add_option("--wire-feed", o.wire_feed, "wire feed rate, mm/s");
  gen->add_option("--layer-height", o.layer_height, "mm");
  gen->add_option("--project", o.project, "project name");
  gen->add_option("--extra", o.extras, "extra process attribute key=value");
  gen->add_option("--config", o.config, "pipeline config JSON");
  gen->add_option("-o,--output", o.output, "PathML XML");
  bind(gen, cmd_pathml_gen);

  auto* validate = pathml_cmd->add_subcommand("validate", "list invariant and limit violations");
  validate->add_option("file", o.input, "PathML XML")->required();
  validate->add_option("--config", o.config, "pipeline config JSON (limits)");
  bind(validate, cmd_pathml_validate);

  auto* expand = pathml_cmd->add_subcommand("expand", "stack a single-layer path into layers");
  expand->add_option("file", o.input, "PathML XML")->required();
  expand->add_option("--layers", o.layers, "layer count")->required();
  expand->add_option("--direction", o.direction, "unit offset direction x,y,z")->capture_default_str();
  expand->add_option("--layer-height", o.layer_height, "override LayerHeight_mm");
  expand->add_option("-o,--output", o.output, "PathML XML");
  bind(expand, cmd_pathml_expand);

  auto* emit = app.add_subcommand("emit", "emit a neutral robot program");
  emit->add_option("file", o.input, "PathML XML")->required();
  emit->add_option("--config", o.config, "pipeline config JSON (limits)");
  emit->add_option("-o,--output", o.output, "program text");
  bind(emit, cmd_emit);

  auto* report = app.add_subcommand("report", "sectioned deviation report");
  report->add_option("--executed", o.executed, "executed path (fused JSON)")->required();
  report->add_option("--nominal", o.nominal, "nominal path (fused JSON)")->required();
  report->add_option("--sections", o.sections, "section breaks in (0,1), comma separated");
  report->add_option("--tolerance", o.tolerance, "mm (default 4)");
  report->add_option("--config", o.config, "pipeline config JSON");
  report->add_option("-o,--output", o.output, "report JSON");
  bind(report, cmd_report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pathfuse: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (!handler) {
    err << app.help();
    return kExitUsage;
  }
  try {
    return handler(o, out, err);
  } catch (const Error& e) {
    err << "pathfuse: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pathfuse: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace pathfuse::cli

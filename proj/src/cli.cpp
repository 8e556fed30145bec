#include "srcf/cli.hpp"

#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srcf/bounds.hpp"
#include "srcf/error.hpp"
#include "srcf/instance.hpp"
#include "srcf/invariants.hpp"
#include "srcf/pressure.hpp"
#include "srcf/transfer.hpp"

namespace srcf {

namespace {

using nlohmann::json;

struct Outcome {
  json result;
  bool certified = true;
  json constants = json::object();
  std::string csv;  // filled when the command has a table view
};

struct Context {
  ProblemInstance inst;
  CliFlags flags;
  ExecutionOptions exec() const { return {flags.threads, flags.deterministic}; }
};

template <class T>
const T& need(const std::optional<T>& v, const char* field) {
  if (!v) throw Error(ErrorCode::kInvalidArgument, std::string("instance needs '") + field + "'");
  return *v;
}

json distortion_json(const DistortionConstant& c) {
  const long double lc = to_long_double(c.log_value);
  return {{"min_digit", c.min_digit}, {"log_C", format_real(lc, 15)}, {"C", format_bracket(std::exp(lc), std::exp(lc), 15)}};
}

json interval_json(const RationalInterval& i) {
  return {{"lo", to_string(i.lo)},
          {"hi", to_string(i.hi)},
          {"length", to_string(i.length())},
          {"decimal", format_bracket(to_long_double(i.lo), to_long_double(i.hi), 15)}};
}

std::vector<Sign> word_signs(const Context& c, std::size_t n) {
  if (c.inst.signs) {
    if (c.inst.signs->size() != n) throw Error(ErrorCode::kInvalidArgument, "'signs' and 'digits' differ in length");
    return *c.inst.signs;
  }
  return need(c.inst.sigma, "sigma or signs").prefix(n);
}

Outcome cmd_expand(const Context& c) {
  const std::size_t depth = c.inst.depth.value_or(20);
  const unsigned bits = c.inst.precision_bits.value_or(256);
  const Expansion e = expand(need(c.inst.x, "x"), need(c.inst.sigma, "sigma"), depth, bits);
  Outcome o;
  json signs = json::array();
  for (Sign s : e.signs) signs.push_back(value(s));
  o.result = {{"x", need(c.inst.x, "x").describe()},
              {"digits", e.digits},
              {"signs", signs},
              {"status", to_string(e.status)},
              {"rational_input", e.rational_input}};
  if (!e.digits.empty()) o.result["enclosure"] = interval_json(e.enclosure());
  if (e.exact_value) o.result["exact_value"] = to_string(*e.exact_value);
  o.certified = e.status == ExpansionStatus::kComplete || e.status == ExpansionStatus::kRationalTermination;
  return o;
}

Outcome cmd_eval(const Context& c) {
  const std::vector<Digit>& d = need(c.inst.digits, "digits");
  const std::vector<Sign> s = word_signs(c, d.size());
  const Rational point = c.inst.point.value_or(Rational(0));
  const Rational v = evaluate(s, d, point);
  Outcome o;
  o.result = {{"value", to_string(v)},
              {"point", to_string(point)},
              {"decimal", format_bracket(to_long_double(v), to_long_double(v), 15)}};
  return o;
}

Outcome cmd_interval(const Context& c) {
  const std::vector<Digit>& d = need(c.inst.digits, "digits");
  const std::vector<Sign> s = word_signs(c, d.size());
  Outcome o;
  o.result = {{"interval", interval_json(fundamental_interval(s, d))}, {"depth", d.size()}};
  return o;
}

Outcome cmd_tau(const Context& c) {
  const DigitSet& b = need(c.inst.b, "B");
  const TauEstimate t = tau(b, c.inst.tolerance.value_or(1e-9L));
  Outcome o;
  o.result = {{"B", b.to_json()}, {"tau", format_bracket(t.lower, t.upper, 15)}, {"method", to_string(t.method)}};
  if (t.exact) o.result["exact"] = to_string(*t.exact);
  if (!t.warning.empty()) o.result["warning"] = t.warning;
  o.certified = t.exact.has_value() || t.upper - t.lower <= c.inst.tolerance.value_or(1e-9L);
  return o;
}

std::shared_ptr<const BlockScheme> scheme_from(const Context& c) {
  return std::make_shared<const BlockScheme>(build_blocks(need(c.inst.b, "B"), need(c.inst.f, "f"),
                                                          need(c.inst.epsilon, "epsilon"), c.inst.horizon.value_or(6)));
}

Outcome cmd_blocks(const Context& c) {
  const auto scheme = scheme_from(c);
  Outcome o;
  json checks = json::array();
  for (const SchemeCheck& k : verify_scheme(*scheme)) {
    checks.push_back({{"name", k.name}, {"pass", k.pass}, {"detail", k.detail}});
    o.certified = o.certified && k.pass;
  }
  o.result = {{"scheme", scheme->to_json()}, {"checks", checks}};
  std::ostringstream csv;
  csv << "m,b_m,block_size,t_m,T_m,block_sum\n";
  for (std::size_t m = 1; m <= scheme->horizon(); ++m) {
    csv << m << ',' << scheme->b(m) << ',' << scheme->block_size(m) << ',' << scheme->t(m) << ','
        << scheme->window_end(m) << ',' << format_real(scheme->block_sum(m), 12) << '\n';
  }
  o.csv = csv.str();
  o.constants = {{"epsilon", format_real(scheme->epsilon(), 12)}};
  return o;
}

Outcome cmd_pressure(const Context& c) {
  const ProblemInstance& in = c.inst;
  const SignSequence sigma = in.sigma.value_or(SignSequence::constant(Sign::kPlus));
  std::optional<NonAutonomousIFS> sys;
  std::vector<std::uint64_t> depths;
  PartitionMode mode;
  if (in.alphabet) {
    const std::uint64_t max_depth = in.depths ? *std::max_element(in.depths->begin(), in.depths->end())
                                              : in.depth.value_or(12);
    sys = assemble(sigma, std::vector<std::vector<Digit>>(max_depth, *in.alphabet));
    if (in.depths) {
      depths = *in.depths;
    } else {
      for (std::uint64_t n = 1; n <= max_depth; ++n) depths.push_back(n);
    }
    mode = PartitionMode::kExact;
  } else {
    sys = assemble(sigma, scheme_from(c), AdmissibilityPolicy::kRepairFirstWindow);
    if (in.depths) {
      depths = *in.depths;
    } else {
      const std::uint64_t end = sys->levels();
      depths = {end - 2, end - 1, end};
    }
    mode = PartitionMode::kFactorized;
  }
  if (in.mode) mode = *in.mode == "exact" ? PartitionMode::kExact : PartitionMode::kFactorized;
  std::sort(depths.begin(), depths.end());
  EnumerationOptions eo;
  eo.exec = c.exec();

  Outcome o;
  o.constants = {{"gamma", to_string(sys->validation().gamma)}, {"L", sys->validation().l}};
  o.result = {{"system", sys->to_json()}};
  if (in.s) {
    const PressureRecord r = lower_pressure(*sys, *in.s, depths, mode, 0, eo);
    o.result["pressure"] = r.to_json();
    std::ostringstream csv;
    csv << "n,s,mode,z_low,z_high,p_low,p_high\n";
    for (const PressureBracket& b : r.brackets) {
      csv << b.n << ',' << format_real(b.s, 12) << ',' << to_string(b.mode) << ',' << format_real(b.z_low, 15) << ','
          << format_real(b.z_high, 15) << ',' << format_real(b.p_low, 15) << ',' << format_real(b.p_high, 15) << '\n';
    }
    o.csv = csv.str();
    return o;
  }
  BowenOptions bo;
  bo.tolerance = in.tolerance.value_or(1e-3L);
  bo.mode = mode;
  bo.estimator = mode == PartitionMode::kExact ? PressureEstimator::kIncrement : PressureEstimator::kAverage;
  bo.depths = depths;
  if (bo.estimator == PressureEstimator::kIncrement) {
    bo.depths.erase(std::remove(bo.depths.begin(), bo.depths.end(), 1u), bo.depths.end());
  }
  bo.enumeration = eo;
  const BowenBracket b = bowen_bisect(*sys, bo);
  o.result["bowen"] = b.to_json();
  o.certified = b.status == BowenStatus::kCertified;
  if (sys->autonomous()) o.result["transfer"] = transfer_dimension(*sys, 1e-12L).to_json();
  std::ostringstream csv;
  csv << "s_minus,s_plus,status,estimator,mode\n"
      << format_real(b.s_minus, 15) << ',' << format_real(b.s_plus, 15) << ',' << to_string(b.status) << ','
      << to_string(b.estimator) << ',' << to_string(b.mode) << '\n';
  o.csv = csv.str();
  return o;
}

LowerOptions lower_options(const Context& c) {
  LowerOptions lo;
  if (c.inst.horizon) lo.horizon = *c.inst.horizon;
  if (c.inst.depths) lo.depths = *c.inst.depths;
  return lo;
}

UpperOptions upper_options(const Context& c) {
  UpperOptions uo;
  if (c.inst.audit_depth) uo.audit_depth = *c.inst.audit_depth;
  if (c.inst.audit_width) uo.audit_width = *c.inst.audit_width;
  uo.exec = c.exec();
  return uo;
}

Outcome cmd_dim_lower(const Context& c) {
  const long double eps = need(c.inst.epsilon, "epsilon");
  const LowerCertificate cert =
      lower_certificate(need(c.inst.b, "B"), need(c.inst.f, "f"), need(c.inst.sigma, "sigma"), eps,
                        c.inst.delta.value_or(eps), lower_options(c));
  Outcome o;
  o.result = cert.to_json();
  o.certified = cert.certified;
  o.constants = {{"C", to_string(cert.constants.c_global)},
                 {"C_0", to_string(cert.constants.c_window)},
                 {"N", cert.constants.n},
                 {"gamma", to_string(cert.system->validation().gamma)},
                 {"L", cert.system->validation().l},
                 {"epsilon", format_real(cert.epsilon, 12)},
                 {"delta", format_real(cert.delta, 12)}};
  std::ostringstream csv;
  csv << "n,log_z_low,chain,log_floor,pass\n";
  for (const DepthCheck& d : cert.depths) {
    csv << d.n << ',' << format_real(d.z_low, 15) << ',' << format_real(d.chain, 15) << ','
        << format_real(cert.log_floor, 15) << ',' << (d.pass ? "pass" : "fail") << '\n';
  }
  o.csv = csv.str();
  return o;
}

Outcome cmd_dim_upper(const Context& c) {
  const UpperCertificate cert =
      upper_certificate(need(c.inst.b, "B"), need(c.inst.sigma, "sigma"), need(c.inst.epsilon, "epsilon"), upper_options(c));
  Outcome o;
  o.result = cert.to_json();
  o.certified = cert.certified;
  o.constants = {{"C", distortion_json(cert.c)}, {"L", to_string(cert.l)}, {"epsilon", format_real(cert.epsilon, 12)}};
  std::ostringstream csv;
  csv << "depth,words,cover_sum,at_most_one,nonincreasing\n";
  for (const CoverAudit& a : cert.covers) {
    csv << a.depth << ',' << a.words << ',' << format_real(a.sum, 15) << ',' << a.at_most_one << ','
        << a.nonincreasing << '\n';
  }
  o.csv = csv.str();
  return o;
}

Outcome cmd_dim(const Context& c) {
  ReportOptions ro;
  if (c.inst.epsilons) ro.epsilons = *c.inst.epsilons;
  if (c.inst.tolerance) ro.tolerance = *c.inst.tolerance;
  ro.lower = lower_options(c);
  ro.upper = upper_options(c);
  const DimensionReport rep = dimension_report(need(c.inst.b, "B"), need(c.inst.f, "f"), need(c.inst.sigma, "sigma"), ro);
  Outcome o;
  o.result = rep.to_json();
  o.certified = rep.within_tolerance;
  json rows = json::array();
  for (const DimensionRow& r : rep.rows) {
    json k{{"epsilon", format_real(r.epsilon, 12)}, {"delta", format_real(r.delta, 12)}};
    if (r.lower) {
      k["N"] = r.lower->constants.n;
      k["C_0"] = to_string(r.lower->constants.c_window);
      k["gamma"] = to_string(r.lower->system->validation().gamma);
      k["L_contraction"] = r.lower->system->validation().l;
    }
    if (r.upper) {
      k["L_cutoff"] = to_string(r.upper->l);
      k["C"] = distortion_json(r.upper->c);
    }
    rows.push_back(k);
  }
  o.constants = {{"rows", rows}};
  o.csv = rep.csv();
  return o;
}

Outcome cmd_verify(const Context& c) {
  InvariantOptions io;
  if (c.inst.sigma) io.sigma = *c.inst.sigma;
  if (c.inst.seed) io.seed = *c.inst.seed;
  if (c.inst.depth) io.depth = *c.inst.depth;
  io.b = c.inst.b;
  io.f = c.inst.f;
  if (c.inst.epsilon) io.epsilon = *c.inst.epsilon;
  if (c.inst.horizon) io.horizon = *c.inst.horizon;
  io.exec = c.exec();
  Outcome o;
  o.result = json::array();
  std::ostringstream csv;
  csv << "check,pass,detail\n";
  for (const InvariantResult& r : run_invariants(io)) {
    o.result.push_back({{"check", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    o.certified = o.certified && r.pass;
    csv << r.name << ',' << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
  }
  o.csv = csv.str();
  o.constants = {{"C", distortion_json(distortion_constant(Digit{3}))}};
  return o;
}

const std::map<std::string, std::function<Outcome(const Context&)>>& commands() {
  static const std::map<std::string, std::function<Outcome(const Context&)>> table{
      {"expand", cmd_expand},         {"eval", cmd_eval},       {"interval", cmd_interval},
      {"tau", cmd_tau},               {"blocks", cmd_blocks},   {"pressure", cmd_pressure},
      {"dim-lower", cmd_dim_lower},   {"dim-upper", cmd_dim_upper}, {"dim", cmd_dim},
      {"verify", cmd_verify}};
  return table;
}

bool input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kHorizonTooSmall:
    case ErrorCode::kLSearchExhausted:
    case ErrorCode::kNoTailBound:
    case ErrorCode::kSchemeBuildFailure:
    case ErrorCode::kOverflow:
      return false;
    default:
      return true;
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : commands()) v.push_back(k);
    return v;
  }();
  return names;
}

CliResult run_command(const std::string& command, std::string_view instance_text, const CliFlags& flags) {
  CliResult res;
  json envelope{{"tool", {{"name", kToolName}, {"version", kToolVersion}}}, {"command", command}};
  try {
    const auto it = commands().find(command);
    if (it == commands().end()) throw Error(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
    Context ctx{parse_instance(instance_text), flags};
    if (flags.seed) ctx.inst.seed = flags.seed;
    if (flags.depth) ctx.inst.depth = flags.depth;
    if (flags.precision_bits) ctx.inst.precision_bits = flags.precision_bits;
    if (flags.tolerance) ctx.inst.tolerance = flags.tolerance;
    envelope["instance"] = ctx.inst.to_json();
    envelope["instance_hash"] = ctx.inst.hash();
    envelope["settings"] = {{"deterministic", flags.deterministic}};

    const Outcome o = it->second(ctx);
    envelope["status"] = o.certified ? "certified" : "indeterminate";
    envelope["constants"] = o.constants;
    envelope["result"] = o.result;
    res.exit_code = o.certified ? 0 : 2;
    if (flags.csv) {
      if (o.csv.empty()) throw Error(ErrorCode::kInvalidArgument, "command '" + command + "' has no CSV view");
      res.out = std::string("# ") + kToolName + ' ' + kToolVersion + "\n# command " + command + "\n# instance_hash " +
                ctx.inst.hash() + "\n# status " + envelope["status"].get<std::string>() + '\n' + o.csv;
    } else {
      res.out = envelope.dump(2) + '\n';
    }
  } catch (const Error& e) {
    res.exit_code = input_error(e.code()) ? 1 : 2;
    json err{{"code", to_string(e.code())}, {"message", e.what()}};
    if (e.index()) err["index"] = *e.index();
    envelope["status"] = res.exit_code == 1 ? "input-error" : "indeterminate";
    envelope["error"] = err;
    res.out = envelope.dump(2) + '\n';
    res.err = std::string(to_string(e.code())) + ": " + e.what() + '\n';
  } catch (const std::exception& e) {
    res.exit_code = 1;
    envelope["status"] = "input-error";
    envelope["error"] = {{"code", "InvalidArgument"}, {"message", e.what()}};
    res.out = envelope.dump(2) + '\n';
    res.err = std::string(e.what()) + '\n';
  }
  return res;
}

}  // namespace srcf

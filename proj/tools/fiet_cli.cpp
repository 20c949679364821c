// Command-line front end: one subcommand per laboratory capability. Every run
// writes a JSON run record and a CSV table; stdout carries the CSV, or the fIET
// record for `construct`.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fiet/constructions.hpp"
#include "fiet/dynamics.hpp"
#include "fiet/error.hpp"
#include "fiet/measure_lab.hpp"
#include "fiet/parallel.hpp"
#include "fiet/rauzy_graph.hpp"
#include "fiet/records.hpp"
#include "fiet/version.hpp"

using namespace fiet;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kBudget = 3;

// Errors that end a run early without the input being wrong.
class Stopped : public Error {
public:
    using Error::Error;
};

std::vector<std::string> tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::size_t to_size(const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw InvalidArgument("not a nonnegative integer: " + s);
    }
    if (pos != s.size() || s.front() == '-') throw InvalidArgument("not a nonnegative integer: " + s);
    return static_cast<std::size_t>(v);
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: " + s);
    }
    if (pos != s.size()) throw InvalidArgument("not a number: " + s);
    return v;
}

// "0..20", "0..20:5", or a comma/space separated list.
std::vector<std::size_t> size_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& t : tokens(text)) {
        auto dots = t.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_size(t));
            continue;
        }
        auto colon = t.find(':', dots);
        std::size_t a = to_size(t.substr(0, dots));
        std::size_t b = to_size(t.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        std::size_t step = colon == std::string::npos ? 1 : to_size(t.substr(colon + 1));
        if (step == 0 || b < a) throw InvalidArgument("bad range: " + t);
        for (std::size_t x = a; x <= b; x += step) out.push_back(x);
    }
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::vector<double> double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& t : tokens(text)) out.push_back(to_double(t));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path);
    return read_all(in);
}

// Options shared by the subcommands.
struct Options {
    std::string perm;
    std::string lengths;
    std::string backend = "rational";
    std::string out;
    bool no_files = false;
    bool quiet = false;

    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::size_t max_steps = 1'000'000;
    long precision = 212;

    // induce
    std::size_t steps = 1;
    bool zorich = false;
    std::string path_out;
    // orbit
    std::string x0;
    std::size_t budget = 1000;
    bool periodic = false;
    std::size_t bins = 0;
    // graph
    std::string cache;
    std::size_t limit = 100000;
    std::size_t loop_len = 0;
    std::size_t classes = 0;
    // construct
    std::string rotation;
    bool glue = false;
    bool normalize = false;
    // experiments
    std::string depths;
    double threshold = -1.0;
    std::size_t gate_depth = 0;
    std::string q;
    std::string thresholds;
    std::string c_grid;
    std::size_t depth = 30;
    std::string loop;
    std::size_t max_len = 30;
    std::string eps;
    std::string resolutions;
    std::size_t per_cell = 2;
    std::size_t targeted = 0;
    std::size_t pairs = 1000;
};

RunOptions run_options(const Options& o) {
    RunOptions r;
    r.samples = o.samples;
    r.seed = o.seed;
    r.threads = o.threads ? o.threads : default_threads();
    r.max_steps = o.max_steps;
    r.escalate_precision = o.precision;
    return r;
}

FlipIET input_fiet(const Options& o) {
    if (o.perm.empty()) return fiet_from_json_text(read_all(std::cin));
    if (o.lengths.empty()) throw InvalidArgument("--lengths is required with --perm");
    return make_fiet(o.perm, tokens(o.lengths), Backend::parse(o.backend));
}

SignedPermutation input_perm(const Options& o, const char* fallback = nullptr) {
    if (o.perm.empty()) {
        if (!fallback) throw InvalidArgument("--perm is required");
        return parse_permutation(fallback);
    }
    return parse_permutation(o.perm);
}

WeightVector input_q(const Options& o, std::size_t n) {
    if (o.q.empty()) return WeightVector::uniform(n);
    std::vector<Scalar> v;
    for (const auto& t : tokens(o.q)) v.push_back(parse_scalar(t));
    return WeightVector(std::move(v));
}

// Section loop: --loop as a case word, else the shortest neat positive loop.
RauzyPath input_loop(const Options& o) {
    auto p = input_perm(o, "3 2 1");
    if (!o.loop.empty()) {
        std::vector<Case> cases;
        for (char c : o.loop) {
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
            cases.push_back(parse_case(std::string(1, c)));
        }
        return path_from_cases(p, cases);
    }
    auto l = find_positive_loop(build_graph(p), p, o.max_len, true);
    if (!l) throw InvalidArgument("no neat positive loop of length <= " + std::to_string(o.max_len) + " at " +
                                  p.to_string());
    return *l;
}

std::string cases_of(const RauzyPath& path) {
    std::string s;
    for (const auto& a : path.arrows()) s += to_string(a.which);
    return s;
}

std::string fmt(double x) { return format_double(x); }

ExperimentReport run_induce(const Options& o) {
    auto f = input_fiet(o);
    ExperimentReport r;
    r.experiment = "induce";
    r.seed = o.seed;
    r.parameters["fiet"] = fiet_to_json(f);
    r.parameters["steps"] = o.steps;
    r.parameters["zorich"] = o.zorich;
    RauzyPath path(f.perm());
    std::string verdict = "SurvivedBudget";
    if (o.zorich) {
        r.columns = {"step", "case", "run_length", "from", "to", "outcome", "total"};
        for (std::size_t i = 1; i <= o.steps; ++i) {
            ZorichResult z;
            try {
                z = zorich_step(f, o.max_steps);
            } catch (const UndecidableComparison&) {
                verdict = "Undecidable";
                break;
            }
            for (const auto& a : z.run.arrows) path.append(a);
            const std::string to = z.run.arrows.empty() ? f.perm().to_string() : z.run.arrows.back().to.to_string();
            r.add_row({std::to_string(i), std::string(to_string(z.run.which)), std::to_string(z.run.length()),
                       f.perm().to_string(), to, std::string(to_string(z.outcome)),
                       z.next ? fmt(z.next->total().to_double()) : ""});
            if (z.outcome != StepOutcome::Advanced) {
                verdict = std::string(to_string(z.outcome));
                break;
            }
            f = *z.next;
        }
    } else {
        r.columns = {"step", "case", "winner", "loser", "from", "to", "outcome", "total"};
        for (std::size_t i = 1; i <= o.steps; ++i) {
            StepResult s;
            try {
                s = rauzy_step(f);
            } catch (const UndecidableComparison&) {
                verdict = "Undecidable";
                break;
            }
            if (s.outcome == StepOutcome::Tie) {
                r.add_row({std::to_string(i), "", "", "", f.perm().to_string(), "", "Tie", ""});
                verdict = "Tie";
                break;
            }
            const auto& a = *s.arrow;
            path.append(a);
            r.add_row({std::to_string(i), std::string(to_string(a.which)), std::to_string(a.winner + 1),
                       std::to_string(a.loser + 1), a.from.to_string(), a.to.to_string(),
                       std::string(to_string(s.outcome)), fmt(s.next->total().to_double())});
            if (s.outcome == StepOutcome::Hole) {
                verdict = "Hole";
                break;
            }
            f = *s.next;
        }
    }
    r.summary["verdict"] = verdict;
    r.summary["steps"] = path.size();
    r.summary["complete"] = is_complete(path);
    r.summary["positive"] = !path.empty() && is_positive(path);
    r.summary["final"] = fiet_to_json(f);
    if (!o.path_out.empty()) {
        std::ofstream out(o.path_out);
        if (!out) throw InvalidArgument("cannot write " + o.path_out);
        out << path_to_jsonl(path);
    }
    if (verdict == "Undecidable") r.passed = false;
    return r;
}

ExperimentReport run_orbit(const Options& o) {
    auto f = input_fiet(o);
    if (o.x0.empty()) throw InvalidArgument("--x0 is required");
    auto x0 = f.lengths().backend().read(o.x0);
    ExperimentReport r;
    r.experiment = "orbit";
    r.seed = o.seed;
    r.parameters["fiet"] = fiet_to_json(f);
    r.parameters["x0"] = x0.to_string();
    r.parameters["budget"] = o.budget;
    auto rec = iterate_orbit(f, x0, o.budget, true);
    r.columns = {"i", "x", "x_double", "cell"};
    for (std::size_t i = 0; i < rec.iterates.size(); ++i)
        r.add_row({std::to_string(i), rec.iterates[i].to_string(), fmt(rec.iterates[i].to_double()),
                   i < rec.cells.size() ? std::to_string(rec.cells[i] + 1) : ""});
    r.summary["stop"] = std::string(to_string(rec.stop));
    r.summary["steps"] = rec.steps;
    r.summary["period"] = rec.period;
    if (o.bins) {
        std::vector<double> pts;
        const double total = f.total().to_double();
        for (const auto& x : rec.iterates) pts.push_back(x.to_double() / total);
        r.summary["bin_discrepancy"] = bin_discrepancy(pts, o.bins);
    }
    if (o.periodic) {
        auto pp = detect_periodic(f, o.budget);
        r.summary["periodic_point"] = pp ? nlohmann::ordered_json{{"period", pp->period}, {"witness", pp->witness.to_string()}}
                                         : nlohmann::ordered_json(nullptr);
    }
    return r;
}

ExperimentReport run_graph(const Options& o) {
    RauzyGraph g;
    bool loaded = false;
    if (!o.cache.empty() && o.perm.empty()) {
        g = RauzyGraph::from_json(read_file(o.cache));
        loaded = true;
    } else {
        try {
            g = build_graph(input_perm(o), o.limit);
        } catch (const LimitExceeded& e) {
            throw Stopped(e.what());
        }
        if (!o.cache.empty()) {
            std::ofstream out(o.cache);
            if (!out) throw InvalidArgument("cannot write " + o.cache);
            out << g.to_json();
        }
    }
    ExperimentReport r;
    r.experiment = "graph";
    r.seed = o.seed;
    r.parameters["seed_perm"] = o.perm;
    r.parameters["limit"] = o.limit;
    r.parameters["cache"] = o.cache;
    r.columns = {"from", "case", "to"};
    for (const auto& e : g.edges())
        r.add_row({g.vertex(e.from).to_string(), std::string(to_string(e.which)),
                   e.to == RauzyGraph::kHole ? "HOLE" : g.vertex(e.to).to_string()});
    r.summary["loaded_from_cache"] = loaded;
    r.summary["vertices"] = g.vertices().size();
    r.summary["edges"] = g.edges().size();
    r.summary["reaches_hole"] = g.reaches_hole();
    if (o.loop_len) {
        auto at = g.vertex(0);
        auto l = find_positive_loop(g, at, o.loop_len, true);
        r.summary["neat_positive_loop"] = l ? nlohmann::ordered_json(cases_of(*l)) : nlohmann::ordered_json(nullptr);
    }
    if (o.classes) {
        auto c = class_counts(o.classes);
        r.summary["classes"] = {{"n", o.classes}, {"with_signs", c.with_signs}, {"flip_free", c.flip_free}};
    }
    return r;
}

FlipIET run_construct(const Options& o) {
    if (o.rotation.empty()) throw InvalidArgument("--rotation is required");
    FlipIET f = o.rotation == "golden" ? golden_rotation() : rotation_iet(parse_scalar(o.rotation));
    if (o.glue) f = glue_flip(f);
    if (o.normalize) f = f.normalized();
    return f;
}

ExperimentReport run_experiment(const std::string& name, const Options& o) {
    auto opt = run_options(o);
    if (name == "survival") {
        auto p = input_perm(o);
        return survival_fraction(p, size_list(o.depths.empty() ? "0..20" : o.depths), opt, o.threshold, o.gate_depth);
    }
    if (name == "kerckhoff") {
        auto p = input_perm(o);
        return kerckhoff_experiment(p, input_q(o, p.size()), double_list(o.thresholds.empty() ? "2,4,8,16" : o.thresholds),
                                    opt);
    }
    if (name == "distortion") {
        auto p = input_perm(o);
        return distortion_experiment(p, input_q(o, p.size()),
                                     double_list(o.c_grid.empty() ? "1.5,2,3,4,8,16,32" : o.c_grid), o.depth, opt);
    }
    if (name == "tails") {
        return roof_tail(input_loop(o), double_list(o.thresholds.empty() ? "2,4,8,16,32" : o.thresholds), opt);
    }
    if (name == "fastdecay") {
        return fast_decay_check(input_loop(o),
                                double_list(o.eps.empty() ? "1e-20,1e-50,1e-100,1e-150,1e-200,1e-250,1e-300" : o.eps),
                                opt);
    }
    if (name == "dimension") {
        auto p = input_perm(o, "2 -3 -1");
        return box_dimension(p, size_list(o.depths.empty() ? "0,5,10,15,20,25" : o.depths),
                             size_list(o.resolutions.empty() ? "64,128,256,512" : o.resolutions), o.per_cell,
                             o.targeted, opt);
    }
    if (name == "expansion") return expansion_check(input_loop(o), o.pairs, opt);
    throw InvalidArgument("unknown subcommand " + name);
}

// "key = value" lines; '#' starts a comment. Each entry becomes "--key value"
// after the command line, so it overrides the flags.
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto eq = line.find('=');
        std::string key = line.substr(0, eq), value = eq == std::string::npos ? "" : line.substr(eq + 1);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
            return s;
        };
        key = trim(key);
        value = trim(value);
        if (key.empty()) continue;
        if (value == "false") continue;
        out.push_back("--" + key);
        if (!value.empty() && value != "true") out.push_back(value);
    }
    return out;
}

nlohmann::ordered_json config_json(const CLI::App& sub, const std::string& config_file) {
    nlohmann::ordered_json j;
    j["subcommand"] = sub.get_name();
    j["config_file"] = config_file;
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const auto* opt : sub.get_options()) {
        if (opt->get_name() == "--help") continue;
        std::string key = opt->get_single_name();
        if (opt->get_expected_min() == 0) {
            opts[key] = opt->count() > 0;
        } else if (opt->count() > 0) {
            opts[key] = opt->results().back();
        } else {
            opts[key] = opt->get_default_str();
        }
    }
    j["options"] = opts;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval exchanges with flips: induction, dynamics and measure experiments"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    std::string config_file;
    app.add_option("--config", config_file, "key = value file; its entries override the flags");
    // Accepted after the subcommand too; see the pre-scan below.

    Options o;
    auto io = [&](CLI::App* s) {
        s->add_option("--out", o.out, "prefix of the .json run record and .csv table (default: fiet-<subcommand>)");
        s->add_flag("--no-files", o.no_files, "skip writing the run record and table");
        s->add_flag("--quiet", o.quiet, "do not print the table");
        s->add_option("--seed", o.seed, "master seed");
    };
    auto fiet_in = [&](CLI::App* s) {
        s->add_option("--perm", o.perm, "permutation text; without it an fIET JSON record is read from stdin");
        s->add_option("--lengths", o.lengths, "lengths as scalar texts");
        s->add_option("--backend", o.backend, "rational | quad:<d> | float:<bits>");
    };
    auto sampling = [&](CLI::App* s) {
        s->add_option("--perm", o.perm, "permutation text");
        s->add_option("--samples", o.samples, "Monte Carlo samples");
        s->add_option("--threads", o.threads, "worker threads (default: FIET_THREADS or the core count)");
        s->add_option("--max-steps", o.max_steps, "step budget per sample");
        s->add_option("--precision", o.precision, "bits used when a sample is re-run exactly");
    };
    auto section = [&](CLI::App* s) {
        s->add_option("--loop", o.loop, "section loop as a word in A and B (default: shortest neat positive loop)");
        s->add_option("--max-len", o.max_len, "longest loop searched");
    };

    auto* induce = app.add_subcommand("induce", "Rauzy or Zorich steps with a trace table");
    fiet_in(induce);
    io(induce);
    induce->add_option("--steps", o.steps, "number of steps");
    induce->add_flag("--zorich", o.zorich, "group same-case steps");
    induce->add_option("--path", o.path_out, "write the path as JSON lines");
    induce->add_option("--max-steps", o.max_steps, "single-step budget of one Zorich step");

    auto* orbit = app.add_subcommand("orbit", "forward orbit of a point");
    fiet_in(orbit);
    io(orbit);
    orbit->add_option("--x0", o.x0, "starting point");
    orbit->add_option("--budget", o.budget, "iterations");
    orbit->add_flag("--periodic", o.periodic, "also search for a periodic point");
    orbit->add_option("--bins", o.bins, "report bin discrepancy over this many bins");

    auto* graph = app.add_subcommand("graph", "Rauzy class of a permutation");
    graph->add_option("--perm", o.perm, "seed permutation");
    io(graph);
    graph->add_option("--cache", o.cache, "graph JSON file, read when --perm is absent and written otherwise");
    graph->add_option("--limit", o.limit, "vertex limit");
    graph->add_option("--loop-len", o.loop_len, "search a neat positive loop at the first vertex");
    graph->add_option("--classes", o.classes, "also count the classes of this size");

    auto* construct = app.add_subcommand("construct", "rotation and glued-flip constructions");
    io(construct);
    construct->add_option("--rotation", o.rotation, "rotation number as a scalar, or golden");
    construct->add_flag("--glue", o.glue, "glue a flipped interval onto the map");
    construct->add_flag("--normalize", o.normalize, "rescale to total length 1");

    auto* survival = app.add_subcommand("survival", "fraction surviving Zorich depth");
    sampling(survival);
    io(survival);
    survival->add_option("--depths", o.depths, "depths, e.g. 0..20 or 0,5,10");
    survival->add_option("--threshold", o.threshold, "gate: fraction at --gate-depth must be below this");
    survival->add_option("--gate-depth", o.gate_depth, "depth checked against --threshold");

    auto* kerck = app.add_subcommand("kerckhoff", "growth of weights before a symbol wins");
    sampling(kerck);
    io(kerck);
    kerck->add_option("--q", o.q, "weights (default uniform)");
    kerck->add_option("--thresholds", o.thresholds, "values of T");

    auto* dist = app.add_subcommand("distortion", "distortion event probabilities");
    sampling(dist);
    io(dist);
    dist->add_option("--q", o.q, "weights (default uniform)");
    dist->add_option("--c", o.c_grid, "values of C, increasing and above 1");
    dist->add_option("--depth", o.depth, "longest prefix");

    auto* tails = app.add_subcommand("tails", "tail of the roof function");
    sampling(tails);
    io(tails);
    section(tails);
    tails->add_option("--thresholds", o.thresholds, "values of T");

    auto* decay = app.add_subcommand("fastdecay", "mass of small first-return cylinders");
    sampling(decay);
    io(decay);
    section(decay);
    decay->add_option("--eps", o.eps, "values of epsilon in (0, 1]");

    auto* dim = app.add_subcommand("dimension", "box counts of Zorich survivors");
    sampling(dim);
    io(dim);
    dim->add_option("--depths", o.depths, "depths");
    dim->add_option("--resolutions", o.resolutions, "grid resolutions, each dividing the finest");
    dim->add_option("--per-cell", o.per_cell, "jittered points per finest cell");
    dim->add_option("--targeted", o.targeted, "points pushed through random hole-free paths");

    auto* exp = app.add_subcommand("expansion", "uniform expansion of a positive branch");
    sampling(exp);
    io(exp);
    section(exp);
    exp->add_option("--pairs", o.pairs, "random pairs");

    // Tune defaults that differ by subcommand before parsing.
    for (auto* s : {tails, decay}) s->get_option("--precision")->default_val(4096);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        // --config may sit anywhere; its entries go last so they win.
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] != "--config") continue;
            if (i + 1 == args.size()) throw InvalidArgument("--config needs a file");
            config_file = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (!config_file.empty()) {
            auto extra = config_args(config_file);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kInvalid;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const std::string prefix = o.out.empty() ? "fiet-" + name : o.out;

    nlohmann::ordered_json record;
    record["version"] = kVersion;
    record["seed"] = o.seed;
    record["config"] = config_json(*sub, config_file);
    int rc = kOk;
    std::string csv;
    try {
        if (name == "construct") {
            auto f = run_construct(o);
            auto j = fiet_to_json(f);
            record["fiet"] = j;
            std::cout << j.dump() << '\n';
        } else {
            ExperimentReport r = name == "induce" ? run_induce(o)
                               : name == "orbit"  ? run_orbit(o)
                               : name == "graph"  ? run_graph(o)
                                                  : run_experiment(name, o);
            r.seed = o.seed;
            if (name == "induce" && r.summary["verdict"] == "Undecidable") rc = kBudget;
            record["report"] = r.to_json();
            csv = r.to_csv();
            if (!o.quiet) std::cout << csv;
        }
        record["status"] = rc == kOk ? "ok" : "stopped";
    } catch (const BudgetExceeded& e) {
        rc = kBudget;
        record["status"] = "stopped";
        record["message"] = e.what();
    } catch (const UndecidableComparison& e) {
        rc = kBudget;
        record["status"] = "stopped";
        record["message"] = e.what();
    } catch (const Stopped& e) {
        rc = kBudget;
        record["status"] = "stopped";
        record["message"] = e.what();
    } catch (const Error& e) {
        rc = kInvalid;
        record["status"] = "invalid";
        record["message"] = e.what();
    }
    record["exit_code"] = rc;
    if (record.contains("message")) std::cerr << "error: " << record["message"].get<std::string>() << '\n';
    if (!o.no_files) {
        try {
            write_text(prefix + ".json", record.dump(2) + "\n");
            if (!csv.empty()) write_text(prefix + ".csv", csv);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kInvalid;
        }
    }
    return rc;
}

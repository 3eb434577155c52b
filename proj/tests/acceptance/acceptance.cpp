// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance                 run every criterion
//   acceptance --print-digest  print the replay digest of the reference audit

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fake_server.hpp"
#include "manifests.hpp"
#include "oracles.hpp"
#include "overton/audit.hpp"
#include "overton/errors.hpp"
#include "overton/hashing.hpp"
#include "overton/manifest.hpp"
#include "overton/reliability.hpp"

using namespace overton;
using nlohmann::json;

namespace {

// Collects the first few problems a criterion runs into.
struct Check {
    std::vector<std::string> problems;
    std::size_t checks = 0;
    std::size_t failed = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) fail(what);
    }
    void fail(const std::string& what) {
        if (++failed <= 5) problems.push_back(what);
    }
    bool ok() const { return failed == 0; }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string pt(Point p) { return "(" + fmt(p.economic) + ", " + fmt(p.social) + ")"; }

// --- 1 ------------------------------------------------------------------

json representable_model(std::mt19937_64& rng, const SurveyInstrument& instr, int index,
                         SyntheticIdeology& out) {
    std::bernoulli_distribution refuse(index % 2 ? 0.08 : 0.0);
    for (const auto& p : instr.propositions)
        if (refuse(rng)) out.refusals.insert(p.id);
    int ne = 0, ns = 0;
    for (const auto& p : instr.propositions)
        if (!out.refusals.count(p.id)) ++(p.axis == Axis::Economic ? ne : ns);
    std::uniform_int_distribution<int> ke(-2 * ne, 2 * ne), ks(-2 * ns, 2 * ns);
    out.base_economic = 5.0 * ke(rng) / ne;
    out.base_social = 5.0 * ks(rng) / ns;
    out.compliance = 1.0;
    json syn = {{"base", {out.base_economic, out.base_social}},
                {"compliance", 1.0},
                {"refusals", std::vector<std::string>(out.refusals.begin(), out.refusals.end())}};
    return {{"id", "synthetic-" + std::to_string(index)}, {"backend", "synthetic"}, {"synthetic", syn}};
}

void criterion_recovery(Check& c) {
    auto instr = testutil::bundled_instrument();
    std::mt19937_64 rng(20240917);
    std::vector<SyntheticIdeology> ideologies(20);
    json models = json::array();
    for (int i = 0; i < 20; ++i) models.push_back(representable_model(rng, instr, i, ideologies[i]));

    testutil::TempDir dir;
    auto outcome = run_audit(parse_manifest(manifests::synthetic(dir.path(), models), "/"));
    c.expect(outcome.exit_code == kExitOk, "audit exit code " + std::to_string(outcome.exit_code) + ": " + outcome.message);
    if (!outcome.report) return;
    c.expect(outcome.report->models.size() == 20, "expected 20 models");

    for (std::size_t i = 0; i < outcome.report->models.size(); ++i) {
        const auto& m = outcome.report->models[i];
        std::vector<Point> recovered;
        for (const auto& cond : m.conditions) {
            const auto& persona = *find_persona(cond.persona_id);
            auto expected = target_point(ideologies[i], persona);
            if (!cond.result) {
                c.expect(false, m.model_id + "/" + cond.persona_id + " excluded");
                continue;
            }
            Point got{cond.result->point.economic, cond.result->point.social};
            c.expect(got == expected, m.model_id + "/" + cond.persona_id + " recovered " + pt(got) +
                                          ", expected " + pt(expected));
            recovered.push_back(got);
        }
        c.expect(m.window.has_value(), m.model_id + " has no window");
        if (!m.window) continue;
        const double oracle_pct = oracle::hull_area(recovered) / 400.0 * 100.0;
        c.expect(std::abs(m.window->area_pct - oracle_pct) <= 1e-9,
                 m.model_id + " area " + fmt(m.window->area_pct) + " vs oracle " + fmt(oracle_pct));
    }
}

// --- 2 ------------------------------------------------------------------

std::set<oracle::Exact> exact_set(const std::vector<Point>& pts) {
    std::set<oracle::Exact> s;
    for (auto p : pts) s.insert(oracle::exact(p));
    return s;
}

void criterion_geometry(Check& c) {
    std::mt19937_64 rng(7001);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
        auto pts = oracle::random_points(rng, size(rng));
        auto hull = convex_hull(pts);
        c.expect(exact_set(hull) == oracle::extreme_points(pts),
                 "set " + std::to_string(trial) + ": hull vertices differ from the extreme-point oracle");

        // grow the set one point at a time; area never shrinks
        double previous = 0.0;
        std::vector<Point> prefix;
        for (auto p : pts) {
            prefix.push_back(p);
            const double a = area_pct(convex_hull(prefix));
            c.expect(a >= previous, "set " + std::to_string(trial) + ": area fell from " + fmt(previous) +
                                        " to " + fmt(a));
            previous = a;
        }
    }
    std::vector<Point> square = {{-10, -10}, {10, -10}, {10, 10}, {-10, 10}};
    std::vector<Point> diamond = {{10, 0}, {0, 10}, {-10, 0}, {0, -10}};
    const double sq = area_pct(convex_hull(square)), di = area_pct(convex_hull(diamond));
    c.expect(sq == 100.0, "full square area " + fmt(sq));
    c.expect(di == 50.0, "diamond area " + fmt(di));
}

// --- 3 ------------------------------------------------------------------

std::optional<double> try_score(const std::map<std::string, Rating>& r, const SurveyInstrument& instr, Axis axis) {
    try {
        return score_axis(r, instr, axis).score;
    } catch (const UndefinedPositionError&) {
        return std::nullopt;
    }
}

void criterion_scoring(Check& c) {
    std::mt19937_64 rng(3003);
    std::uniform_int_distribution<std::size_t> size(2, 62);
    std::uniform_int_distribution<int> label(0, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        auto instr = oracle::random_instrument(rng, size(rng));
        std::map<std::string, Rating> r;
        for (const auto& p : instr.propositions) r[p.id] = kAllRatings[label(rng)];
        const std::string tag = "trial " + std::to_string(trial);

        auto mirrored = r;
        for (auto& [id, rating] : mirrored) rating = mirror(rating);
        auto flipped = instr;
        for (auto& p : flipped.propositions) p.polarity = -p.polarity;
        auto shuffled = instr;
        std::shuffle(shuffled.propositions.begin(), shuffled.propositions.end(), rng);
        auto reduced = instr;
        auto reduced_r = r;
        std::erase_if(reduced.propositions, [&](const Proposition& p) { return r.at(p.id) == Rating::Refusal; });
        for (auto it = reduced_r.begin(); it != reduced_r.end();)
            it = it->second == Rating::Refusal ? reduced_r.erase(it) : std::next(it);

        for (Axis axis : {Axis::Economic, Axis::Social}) {
            auto s = try_score(r, instr, axis);
            bool any_answered = false;
            for (const auto& p : instr.propositions)
                any_answered = any_answered || (p.axis == axis && r.at(p.id) != Rating::Refusal);
            c.expect(s.has_value() == any_answered, tag + ": undefined-position rule");
            if (!s) continue;
            c.expect(*s >= -10.0 && *s <= 10.0, tag + ": score " + fmt(*s) + " out of bounds");
            c.expect(try_score(mirrored, instr, axis) == -*s, tag + ": mirror antisymmetry");
            c.expect(try_score(r, flipped, axis) == -*s, tag + ": polarity-flip negation");
            c.expect(try_score(r, shuffled, axis) == *s, tag + ": permutation invariance");
            c.expect(try_score(reduced_r, reduced, axis) == *s, tag + ": refusal removal");
        }
    }
}

// --- 4 ------------------------------------------------------------------

void criterion_reliability(Check& c) {
    std::mt19937_64 rng(4004);
    std::uniform_int_distribution<int> label(0, 5), len(1, 200);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Rating> g(len(rng)), p(g.size());
        for (auto& x : g) x = kAllRatings[label(rng)];
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = trial % 2 && i % 3 ? g[i] : kAllRatings[label(rng)];
        const double k = cohen_kappa(g, p), ok = oracle::kappa(g, p);
        const double a = binary_agreement(g, p), oa = oracle::agreement(g, p);
        c.expect(std::abs(k - ok) <= 1e-12, "kappa " + fmt(k) + " vs oracle " + fmt(ok));
        c.expect(std::abs(a - oa) <= 1e-12, "agreement " + fmt(a) + " vs oracle " + fmt(oa));
        auto rep = reliability_report(g, p);
        c.expect(std::abs(kappa_from_matrix(rep.confusion) - rep.cohen_kappa) <= 1e-12, "kappa from matrix");
    }
    using R = Rating;
    std::vector<R> g = {R::Agree, R::Agree, R::Disagree, R::Disagree};
    std::vector<R> p = {R::Agree, R::Agree, R::Disagree, R::Agree};
    c.expect(std::abs(cohen_kappa(g, p) - 0.5) <= 1e-12, "4-item kappa " + fmt(cohen_kappa(g, p)));
    c.expect(binary_agreement(g, p) == 0.75, "4-item agreement");

    std::mt19937_64 fixed(10000);
    std::vector<R> gi(10000), pi(10000);
    for (auto& x : gi) x = kAllRatings[label(fixed)];
    for (auto& x : pi) x = kAllRatings[label(fixed)];
    const double ki = cohen_kappa(gi, pi);
    c.expect(std::abs(ki) <= 0.05, "independent raters kappa " + fmt(ki));
}

// --- 5 ------------------------------------------------------------------

Band expected_band(double v) {
    if (v > 7.5) return Band::ExtremePos;
    if (v > 1.5) return Band::Pos;
    if (v >= -1.5) return Band::Centre;
    if (v >= -7.5) return Band::Neg;
    return Band::ExtremeNeg;
}

void criterion_bands(Check& c) {
    std::vector<double> values;
    for (int i = -400; i <= 400; ++i) values.push_back(i / 40.0);  // steps of 0.025, thresholds included
    for (double t : {-10.0, -7.5, -1.5, 0.0, 1.5, 7.5, 10.0}) {
        values.push_back(std::nextafter(t, -11.0));
        values.push_back(std::nextafter(t, 11.0));
    }
    std::erase_if(values, [](double v) { return v < -10.0 || v > 10.0; });
    for (double e : values)
        for (double s : values) {
            auto [be, bs] = classify({e, s});
            c.expect(be == expected_band(e) && bs == expected_band(s), "classify " + pt({e, s}));
        }
    c.expect(classify({7.5, 0}).first == Band::Pos, "(7.5, 0) economic band");
    c.expect(classify({0, 7.5}).second == Band::Pos, "(0, 7.5) social band");
    c.expect(classify({1.5, 0}).first == Band::Centre, "(1.5, 0) economic band");
    auto [le, ls] = classify({-5.1, -5.1});
    c.expect(economic_band_label(le) == "left" && social_band_label(ls) == "lib", "(-5.1, -5.1) bands");
    bool threw = false;
    try {
        classify({10.5, 0});
    } catch (const GeometryError&) {
        threw = true;
    }
    c.expect(threw, "out-of-range point accepted");
}

// --- 6 ------------------------------------------------------------------

json reference_models() {
    return json::array({manifests::synthetic_model("model-left", -6, 4),
                        manifests::synthetic_model("model-right", 3.7, -2.2, 0.6),
                        manifests::synthetic_model("model-flaky", 0.5, 8, 1.0, 0.05)});
}

std::string digest(const std::map<std::string, std::string>& files) {
    std::string all;
    for (const auto& [name, content] : files) {
        all += name;
        all.push_back('\0');
        all += content;
        all.push_back('\0');
    }
    return sha256_hex(all);
}

std::string reference_digest(const std::filesystem::path& dir) {
    auto outcome = run_audit(parse_manifest(manifests::synthetic(dir, reference_models()), "/"));
    RunOptions opts;
    opts.mode = RecordMode::ReplayStrict;
    opts.output_dir = dir / "replay";
    run_audit(parse_manifest(manifests::synthetic(dir, reference_models()), "/"), opts);
    return digest(manifests::snapshot(dir / "replay"));
}

void criterion_replay(Check& c) {
    testutil::TempDir dir;
    auto doc = manifests::synthetic(dir.path(), reference_models());
    auto manifest_path = manifests::write(dir / "manifest.json", doc);
    auto recorded_run = run_audit(load_manifest(manifest_path));
    c.expect(recorded_run.exit_code == kExitOk || recorded_run.exit_code == kExitPartialFailure,
             "recording run failed: " + recorded_run.message);
    auto recorded = manifests::snapshot(dir / "out");
    const auto cassette_bytes = testutil::read_file(dir / "cassette.ndjson");

    std::vector<std::map<std::string, std::string>> replays;
    for (int round = 0; round < 2; ++round) {
        RunOptions opts;
        opts.mode = RecordMode::ReplayStrict;
        opts.output_dir = dir / ("replay-" + std::to_string(round));
        auto outcome = run_audit(load_manifest(manifest_path), opts);
        c.expect(outcome.exit_code == recorded_run.exit_code, "replay exit code " + std::to_string(outcome.exit_code));
        c.expect(outcome.live_calls == 0, "replay made " + std::to_string(outcome.live_calls) + " live calls");
        replays.push_back(manifests::snapshot(*opts.output_dir));
    }
    auto cli = manifests::cli("run --manifest " + manifests::quoted(manifest_path) + " --replay --out " +
                                  manifests::quoted(dir / "replay-cli"),
                              dir.path());
    c.expect(cli.err.find("(0 live call(s))") != std::string::npos, "CLI replay: " + cli.err);
    replays.push_back(manifests::snapshot(dir / "replay-cli"));

    std::size_t svgs = 0;
    for (const auto& [name, content] : recorded) svgs += name.ends_with(".svg");
    c.expect(svgs == 4, "expected 4 SVG plots, found " + std::to_string(svgs));
    for (std::size_t i = 0; i < replays.size(); ++i)
        c.expect(replays[i] == recorded, "replay " + std::to_string(i) + " differs from the recorded outputs");
    c.expect(testutil::read_file(dir / "cassette.ndjson") == cassette_bytes, "replay modified the cassette");

    // a live HTTP backend, replayed while its server is still listening, gets no traffic
    fakes::HttpServer server([](const httplib::Request&, httplib::Response& res) {
        json reply = {{"choices", json::array({{{"message", {{"content", "I strongly disagree."}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    testutil::TempDir http_dir;
    auto http = manifests::synthetic(http_dir.path(), json::array({{{"id", "http-model"},
                                                                    {"backend", "chat-completions"},
                                                                    {"endpoint", server.url("/v1")}}}));
    auto http_manifest = parse_manifest(http, "/");
    auto live = run_audit(http_manifest);
    const auto live_requests = server.seen().size();
    c.expect(live_requests == 558, "recording sent " + std::to_string(live_requests) + " requests");
    RunOptions opts;
    opts.mode = RecordMode::ReplayStrict;
    opts.output_dir = http_dir / "replay";
    auto replay = run_audit(http_manifest, opts);
    c.expect(server.seen().size() == live_requests, "replay-strict reached the network");
    c.expect(manifests::snapshot(http_dir / "replay") == manifests::snapshot(http_dir / "out"),
             "HTTP-backed replay differs");

    // outputs produced elsewhere must match the reference digest checked into the repository
    auto expected = testutil::read_file(std::filesystem::path(OVERTON_ACCEPTANCE_DIR) / "replay_digest.txt");
    while (!expected.empty() && std::isspace(static_cast<unsigned char>(expected.back()))) expected.pop_back();
    testutil::TempDir ref_dir;
    auto got = reference_digest(ref_dir.path());
    c.expect(got == expected, "replay digest " + got + " differs from the reference " + expected);
}

// --- 7 ------------------------------------------------------------------

std::map<std::string, std::size_t> kind_counts(const std::filesystem::path& cassette_path) {
    Cassette cassette(cassette_path);
    std::map<std::string, std::size_t> out;
    for (const auto& e : cassette.entries()) ++out[e.kind];
    return out;
}

void criterion_grid(Check& c) {
    auto instr = testutil::bundled_instrument();
    {
        testutil::TempDir dir;
        auto outcome = run_audit(parse_manifest(
            manifests::synthetic(dir.path(), json::array({manifests::synthetic_model("complete", 2, -3)})), "/"));
        auto counts = kind_counts(dir / "cassette.ndjson");
        c.expect(outcome.exit_code == kExitOk, "complete run exit code " + std::to_string(outcome.exit_code));
        c.expect(counts["essay"] == 558, "essay records: " + std::to_string(counts["essay"]));
        c.expect(counts["assessment"] == 558, "assessor records: " + std::to_string(counts["assessment"]));
        c.expect(counts["failure"] == 0, "unexpected failures");
    }

    testutil::TempDir dir;
    auto model = manifests::synthetic_model("faulty", 2, -3, 1.0, 0.10);
    model["synthetic"]["fault_seed"] = "acceptance-faults";
    auto outcome = run_audit(parse_manifest(manifests::synthetic(dir.path(), json::array({model})), "/"));
    c.expect(outcome.exit_code == kExitPartialFailure, "faulty run exit code " + std::to_string(outcome.exit_code));

    // the cells the injector fails, computed independently of the run
    FaultInjectingBackend injector(std::make_shared<SyntheticAssessor>(), 0.10, "acceptance-faults");
    std::set<std::pair<std::string, std::string>> injected;
    for (const auto& persona : persona_catalog())
        for (const auto& prop : instr.propositions)
            if (injector.should_fail(build_prompt(prop, persona))) injected.insert({persona.id, prop.id});
    c.expect(!injected.empty(), "no cells were selected for injection");

    Cassette cassette(dir / "cassette.ndjson");
    std::set<std::pair<std::string, std::string>> failed, essays, rated;
    std::map<std::string, std::pair<std::string, std::string>> essay_cell;
    for (const auto& e : cassette.entries()) {
        std::pair<std::string, std::string> cell;
        if (e.kind == kKindFailure || e.kind == kKindEssay)
            cell = {e.payload.at("persona_id").get<std::string>(), e.payload.at("proposition_id").get<std::string>()};
        if (e.kind == kKindFailure) failed.insert(cell);
        if (e.kind == kKindEssay) {
            essays.insert(cell);
            essay_cell[e.record_id] = cell;
        }
    }
    for (const auto& e : cassette.entries())
        if (e.kind == kKindAssessment) {
            auto it = essay_cell.find(e.payload.at("essay_record_id").get<std::string>());
            c.expect(it != essay_cell.end(), "assessment without a recorded essay");
            if (it != essay_cell.end()) rated.insert(it->second);
        }
    c.expect(failed == injected, "failure annotations " + std::to_string(failed.size()) + " vs injected " +
                                     std::to_string(injected.size()));
    c.expect(essays.size() + injected.size() == 558, "essays + failures != 558");
    c.expect(rated == essays, "assessments do not cover exactly the recorded essays");

    std::size_t report_failures = 0, null_ratings = 0, traced = 0;
    if (outcome.report) {
        for (const auto& m : outcome.report->models) {
            report_failures += m.failures.size();
            for (const auto& cond : m.conditions) {
                if (!cond.result) continue;
                for (const auto& t : cond.result->trace) {
                    ++traced;
                    const bool was_injected = injected.count({cond.persona_id, t.proposition_id}) > 0;
                    null_ratings += !t.rating.has_value();
                    c.expect(was_injected != t.rating.has_value(),
                             "trace for " + cond.persona_id + "/" + t.proposition_id + " has a fabricated or missing rating");
                }
            }
        }
    }
    c.expect(report_failures == injected.size(), "report lists " + std::to_string(report_failures) + " failures");
    c.expect(traced == 558, "trace covers " + std::to_string(traced) + " cells");
    c.expect(null_ratings == injected.size(), "unrated trace entries " + std::to_string(null_ratings));
}

struct Criterion {
    int number;
    std::string name;
    double limit_s;  // 0: no runtime bound
    std::function<void(Check&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--print-digest") {
        testutil::TempDir dir;
        std::cout << reference_digest(dir.path()) << "\n";
        return 0;
    }

    const std::vector<Criterion> criteria = {
        {1, "synthetic end-to-end recovery (20 ideologies)", 30, criterion_recovery},
        {2, "geometry oracle suite (500 point sets)", 10, criterion_geometry},
        {3, "scoring properties (1000 instruments)", 10, criterion_scoring},
        {4, "reliability statistics", 0, criterion_reliability},
        {5, "band thresholds (boundary grid)", 0, criterion_bands},
        {6, "determinism and replay", 0, criterion_replay},
        {7, "grid completeness and failure injection", 0, criterion_grid},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            cr.run(check);
        } catch (const std::exception& e) {
            check.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.limit_s > 0 && secs > cr.limit_s)
            check.fail("runtime " + fmt(secs) + " s exceeds " + fmt(cr.limit_s) + " s");

        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (check.ok() ? "PASS" : "FAIL") << "  [" << cr.number << "] " << cr.name << "  (" << check.checks
                  << " checks, " << timing << ")\n";
        for (const auto& p : check.problems) std::cout << "        " << p << "\n";
        if (check.failed > check.problems.size())
            std::cout << "        ... " << check.failed - check.problems.size() << " more\n";
        if (!check.ok()) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

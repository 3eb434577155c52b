#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "overton/audit.hpp"
#include "overton/errors.hpp"
#include "overton/geometry.hpp"
#include "overton/manifest.hpp"
#include "overton/persona.hpp"
#include "overton/reliability.hpp"
#include "overton/scoring.hpp"

namespace py = pybind11;
using namespace overton;

namespace {

using XY = std::pair<double, double>;

std::vector<Point> to_points(const std::vector<XY>& xs) {
    std::vector<Point> out;
    out.reserve(xs.size());
    for (auto [e, s] : xs) out.push_back({e, s});
    return out;
}

std::vector<XY> from_points(const std::vector<Point>& ps) {
    std::vector<XY> out;
    for (auto p : ps) out.emplace_back(p.economic, p.social);
    return out;
}

OvertonWindow window_from(const std::vector<XY>& pts) {
    std::vector<SourcePoint> src;
    for (std::size_t i = 0; i < pts.size(); ++i) src.push_back({"p" + std::to_string(i), {pts[i].first, pts[i].second}});
    return build_window("python", std::move(src));
}

}  // namespace

PYBIND11_MODULE(_overton, m) {
    m.doc() = "Core of the overton audit toolkit";

    static py::exception<Error> base(m, "OvertonError", PyExc_RuntimeError);
    static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
    static py::exception<ParseError> parse(m, "ParseError", base.ptr());
    static py::exception<UndefinedPositionError> undefined(m, "UndefinedPositionError", base.ptr());
    static py::exception<GeometryError> geometry(m, "GeometryError", base.ptr());
    static py::exception<ReplayMissError> replay_miss(m, "ReplayMissError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config, e.what());
        } catch (const ParseError& e) {
            py::set_error(parse, e.what());
        } catch (const UndefinedPositionError& e) {
            py::set_error(undefined, e.what());
        } catch (const GeometryError& e) {
            py::set_error(geometry, e.what());
        } catch (const ReplayMissError& e) {
            py::set_error(replay_miss, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::enum_<Rating>(m, "Rating")
        .value("STRONGLY_AGREE", Rating::StronglyAgree)
        .value("AGREE", Rating::Agree)
        .value("NEUTRAL", Rating::Neutral)
        .value("DISAGREE", Rating::Disagree)
        .value("STRONGLY_DISAGREE", Rating::StronglyDisagree)
        .value("REFUSAL", Rating::Refusal)
        .def_property_readonly("label", [](Rating r) { return std::string(label(r)); });

    py::enum_<Axis>(m, "Axis").value("ECONOMIC", Axis::Economic).value("SOCIAL", Axis::Social);

    py::class_<Proposition>(m, "Proposition")
        .def_readonly("id", &Proposition::id)
        .def_readonly("text", &Proposition::text)
        .def_readonly("axis", &Proposition::axis)
        .def_readonly("polarity", &Proposition::polarity)
        .def("__repr__", [](const Proposition& p) { return "<Proposition " + p.id + ">"; });

    py::class_<SurveyInstrument>(m, "SurveyInstrument")
        .def_readonly("name", &SurveyInstrument::name)
        .def_readonly("propositions", &SurveyInstrument::propositions)
        .def("__len__", [](const SurveyInstrument& s) { return s.propositions.size(); });

    py::class_<Persona>(m, "Persona")
        .def_readonly("id", &Persona::id)
        .def_readonly("display_name", &Persona::display_name)
        .def_readonly("preamble", &Persona::preamble)
        .def("__repr__", [](const Persona& p) { return "<Persona " + p.id + ">"; });

    m.def("parse_rating", &parse_rating, py::arg("raw"));
    m.def("load_instrument", &load_instrument, py::arg("path"));
    m.def("persona_catalog", [] { return persona_catalog(); });
    m.def("build_prompt", &build_prompt, py::arg("proposition"), py::arg("persona"));

    m.def("cohen_kappa", [](const std::vector<Rating>& g, const std::vector<Rating>& p) { return cohen_kappa(g, p); },
          py::arg("gold"), py::arg("pred"));
    m.def("binary_agreement",
          [](const std::vector<Rating>& g, const std::vector<Rating>& p) { return binary_agreement(g, p); },
          py::arg("gold"), py::arg("pred"));
    m.def("reliability_report_json",
          [](const std::vector<Rating>& g, const std::vector<Rating>& p) { return to_json(reliability_report(g, p)).dump(); },
          py::arg("gold"), py::arg("pred"));

    m.def("compute_position",
          [](const std::map<std::string, Rating>& ratings, const SurveyInstrument& instr) {
              auto p = compute_position(ratings, instr);
              return std::make_pair(p.economic, p.social);
          },
          py::arg("ratings"), py::arg("instrument"));

    m.def("convex_hull", [](const std::vector<XY>& pts) { return from_points(convex_hull(to_points(pts))); },
          py::arg("points"));
    m.def("area_pct", [](const std::vector<XY>& pts) { return area_pct(convex_hull(to_points(pts))); },
          py::arg("points"), "Area of the hull of `points` as a percentage of the compass.");
    m.def("classify",
          [](double e, double s) {
              auto [be, bs] = classify({e, s});
              return std::make_pair(std::string(economic_band_label(be)), std::string(social_band_label(bs)));
          },
          py::arg("economic"), py::arg("social"));
    m.def("quadrant_coverage", [](const std::vector<XY>& pts) { return quadrant_coverage(window_from(pts)); },
          py::arg("points"));

    m.def("run_audit_json",
          [](const std::filesystem::path& manifest, const std::optional<std::string>& mode,
             const std::optional<std::filesystem::path>& out) {
              auto parsed = load_manifest(manifest);
              RunOptions opts;
              if (mode) {
                  opts.mode = record_mode_from_string(*mode);
                  if (!opts.mode) throw ConfigError("unknown record mode " + *mode);
              }
              opts.output_dir = out;
              RunOutcome outcome;
              {
                  py::gil_scoped_release release;
                  outcome = run_audit(parsed, opts);
              }
              return std::make_tuple(outcome.exit_code, outcome.report ? to_json(*outcome.report).dump() : std::string(),
                                     outcome.live_calls, outcome.message);
          },
          py::arg("manifest"), py::arg("mode") = py::none(), py::arg("out") = py::none());
}

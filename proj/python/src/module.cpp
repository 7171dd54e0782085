#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "bohr/dynamics.hpp"
#include "bohr/error.hpp"
#include "bohr/homoclinic.hpp"
#include "bohr/mgood.hpp"
#include "bohr/riesz.hpp"
#include "bohr/spectra.hpp"

namespace py = pybind11;
using namespace bohr;

namespace {

// JSON crosses the boundary as text and comes back as Python objects
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

LaurentPoly as_poly(const py::object& o, int dim) {
    if (py::isinstance<LaurentPoly>(o)) return o.cast<LaurentPoly>();
    if (py::isinstance<py::str>(o)) return parse_any(o.cast<std::string>(), dim);
    return poly_from_json(from_py(o));
}

MahlerMethod method_from(const std::string& s) {
    if (s == "jensen") return MahlerMethod::jensen;
    if (s == "quadrature") return MahlerMethod::quadrature;
    throw PreconditionError("method must be 'jensen' or 'quadrature'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bohr: Laurent polynomials, Mahler measures, m-good certificates, Riesz products, weighted averages";
    m.attr("__version__") = BOHR_VERSION;

    static py::exception<Error> base(m, "BohrError", PyExc_RuntimeError);
    static py::exception<ParseError> parse_exc(m, "ParseError", base.ptr());
    static py::exception<PreconditionError> pre_exc(m, "PreconditionError", base.ptr());
    static py::exception<DimensionMismatch> dim_exc(m, "DimensionMismatch", base.ptr());
    static py::exception<RouteInapplicable> route_exc(m, "RouteInapplicable", base.ptr());
    static py::exception<NumericalFailure> num_exc(m, "NumericalFailure", base.ptr());
    static py::exception<DissociationFailure> dis_exc(m, "DissociationFailure", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            parse_exc(e.what());
        } catch (const PreconditionError& e) {
            pre_exc(e.what());
        } catch (const DimensionMismatch& e) {
            dim_exc(e.what());
        } catch (const RouteInapplicable& e) {
            route_exc(e.what());
        } catch (const NumericalFailure& e) {
            num_exc(e.what());
        } catch (const DissociationFailure& e) {
            dis_exc(e.what());
        } catch (const Error& e) {
            base(e.what());
        }
    });

    py::class_<LaurentPoly>(m, "Poly")
        .def(py::init([](const std::string& text, int dim) { return parse_any(text, dim); }), py::arg("text"),
             py::arg("dim") = 0)
        .def_property_readonly("dim", &LaurentPoly::dim)
        .def("l1_norm", [](const LaurentPoly& f) { return f.l1_norm().get_str(); })
        .def("to_json", [](const LaurentPoly& f) { return to_py(to_json(f)); })
        .def("__str__", [](const LaurentPoly& f) { return render(f); })
        .def("__repr__", [](const LaurentPoly& f) { return "Poly('" + render(f) + "')"; })
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self == py::self)
        .def("involute", [](const LaurentPoly& f) { return involute(f); });

    m.def("parse", [](const std::string& text, int dim) { return parse_any(text, dim); }, py::arg("text"), py::arg("dim") = 0);
    m.def("divides", [](const py::object& f, const py::object& v, int dim) { return divides(as_poly(f, dim), as_poly(v, dim)); },
          py::arg("f"), py::arg("v"), py::arg("dim") = 0, "quotient q with q*f == v, or None");

    m.def(
        "mahler_measure",
        [](const py::object& f, const std::string& method, int grid, int dim) {
            return mahler_measure(as_poly(f, dim), method_from(method), grid).value;
        },
        py::arg("f"), py::arg("method") = "jensen", py::arg("grid") = 4096, py::arg("dim") = 0);
    m.def(
        "complex_roots", [](const py::object& f) { return complex_roots(as_poly(f, 1)).roots; }, py::arg("f"));
    m.def(
        "padic_escape",
        [](const py::object& f) -> py::object {
            auto e = padic_escape(as_poly(f, 1));
            if (!e) return py::none();
            py::dict d;
            d["prime"] = e->prime;
            d["slope"] = e->slope.get_str();
            d["escape_modulus"] = e->escape_modulus;
            return d;
        },
        py::arg("f"));
    m.def(
        "kronecker_factor",
        [](const py::object& f) -> py::object {
            auto k = kronecker_factor(as_poly(f, 1));
            if (!k) return py::none();
            py::list factors;
            for (const auto& fac : k->factors) factors.append(py::make_tuple(fac.index, fac.dilation));
            py::dict d;
            d["sign"] = k->sign;
            d["shift"] = k->monomial_shift;
            d["factors"] = factors;
            return d;
        },
        py::arg("f"));

    m.def(
        "certify",
        [](const py::object& f, const std::string& route, int dim) {
            const LaurentPoly p = as_poly(f, dim);
            if (route == "archimedean") return to_py(to_json(certify_archimedean(p)));
            if (route == "padic") {
                auto c = certify_padic(p);
                if (!c) throw RouteInapplicable("no p-adic escape for " + render(p));
                return to_py(to_json(*c));
            }
            throw PreconditionError("route must be 'archimedean' or 'padic'; use certify_gap for the gap route");
        },
        py::arg("f"), py::arg("route") = "archimedean", py::arg("dim") = 0);
    m.def(
        "certify_gap",
        [](const py::object& f, int B, int H, bool assume_irreducible) {
            const LaurentPoly p = as_poly(f, 0);
            return to_py(to_json(certify_gap(p, fundamental_homoclinic(p, B), H, assume_irreducible)));
        },
        py::arg("f"), py::arg("B") = 32, py::arg("H") = 2, py::arg("assume_irreducible") = false);
    m.def(
        "verify_certificate",
        [](const py::object& cert) {
            VerificationReport r = verify_certificate(from_py(cert));
            py::dict d;
            d["valid"] = r.valid;
            d["checks"] = r.checks;
            d["failures"] = r.failures;
            return d;
        },
        py::arg("certificate"));
    m.def(
        "falsify",
        [](const py::object& f, long mm, long D, const std::string& condition, int dim) -> py::object {
            auto ce = falsify(as_poly(f, dim), mm, D, condition_from_string(condition));
            if (!ce) return py::none();
            return to_py(to_json(*ce));
        },
        py::arg("f"), py::arg("m"), py::arg("D"), py::arg("condition") = "C1", py::arg("dim") = 0);

    m.def(
        "fundamental_homoclinic",
        [](const py::object& f, int B) {
            const LaurentPoly p = as_poly(f, 0);
            SummableArray w = fundamental_homoclinic(p, B);
            py::object d = to_py(to_json(w));
            d["residual"] = verify_homoclinic(p, w);
            return d;
        },
        py::arg("f"), py::arg("B") = 32);
    m.def(
        "gap_radius",
        [](const py::object& f, int H, int B) {
            const LaurentPoly p = as_poly(f, 0);
            return gap_radius(p, fundamental_homoclinic(p, B), H);
        },
        py::arg("f"), py::arg("H") = 2, py::arg("B") = 32);

    m.def(
        "riesz_fourier_coeff",
        [](const py::object& f, long mm, int N, const py::object& h, std::vector<std::complex<double>> coeffs) {
            const LaurentPoly p = as_poly(f, 0);
            return riesz_fourier_coeff(make_riesz_spec(p, mm, N, std::move(coeffs)), as_poly(h, p.dim()));
        },
        py::arg("f"), py::arg("m"), py::arg("N"), py::arg("h"), py::arg("coeffs") = std::vector<std::complex<double>>{});

    m.def("mobius_sieve", &mobius_sieve, py::arg("N"));
    m.def(
        "weighted_average",
        [](const py::object& f, std::vector<double> x0, const std::string& weights, std::uint64_t seed, long N) {
            ToralModel model(as_poly(f, 1));
            return weighted_average(model, TorusPoint::from_reals(x0), weight(weight_kind_from_string(weights), seed, N), N);
        },
        py::arg("f"), py::arg("x0"), py::arg("weights") = "bernoulli", py::arg("seed") = 0, py::arg("N") = 10000);
    m.def(
        "orbit",
        [](const py::object& f, std::vector<double> x0, long length) {
            ToralModel model(as_poly(f, 1));
            std::vector<double> out;
            for (auto u : model.orbit(TorusPoint::from_reals(x0), length)) out.push_back(to_real(u));
            return out;
        },
        py::arg("f"), py::arg("x0"), py::arg("length"));
}

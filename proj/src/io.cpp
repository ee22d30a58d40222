#include "qsd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsd/linalg.hpp"

namespace qsd {

namespace {

[[noreturn]] void parse_fail(const std::string& detail) {
    throw Error(ErrorCode::ParseError, detail);
}

void require_object(const Json& j, const std::string& what) {
    if (!j.is_object()) parse_fail(what + " must be a JSON object");
}

void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                        const std::string& what) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) parse_fail("unknown field \"" + item.key() + "\" in " + what);
    }
}

const Json& require_field(const Json& j, const char* key, const std::string& what) {
    auto it = j.find(key);
    if (it == j.end()) parse_fail(what + " is missing field \"" + std::string(key) + "\"");
    return *it;
}

double get_number(const Json& j, const std::string& what) {
    if (!j.is_number()) parse_fail(what + " must be a number");
    return j.get<double>();
}

int get_int(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) parse_fail(what + " must be an integer");
    return j.get<int>();
}

cxd get_complex(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        parse_fail(what + " must be a [re, im] pair");
    return cxd(j[0].get<double>(), j[1].get<double>());
}

Mat square_matrix_from_json(const Json& j, int n, const std::string& what) {
    Mat a = matrix_from_json(j, what);
    if (a.rows() != n || a.cols() != n)
        parse_fail(what + " must be " + std::to_string(n) + " x " + std::to_string(n) + ", got " +
                   std::to_string(a.rows()) + " x " + std::to_string(a.cols()));
    return a;
}

Mat factor_from_json(const Json& j, int n, const std::string& what) {
    Mat a = matrix_from_json(j, what);
    if (a.rows() != n)
        parse_fail(what + " must have " + std::to_string(n) + " rows, got " + std::to_string(a.rows()));
    return a;
}

std::vector<Mat> matrix_list_from_json(const Json& j, int n, bool square, const std::string& what) {
    if (!j.is_array() || j.empty()) parse_fail(what + " must be a non-empty array of matrices");
    std::vector<Mat> out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string entry = what + "[" + std::to_string(i) + "]";
        out.push_back(square ? square_matrix_from_json(j[i], n, entry)
                             : factor_from_json(j[i], n, entry));
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail("cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) parse_fail("read error on \"" + path + "\"");
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) parse_fail("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) parse_fail("write error on \"" + path + "\"");
}

Json matrix_to_json(const Mat& a) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            row.push_back(Json::array({a(r, c).real(), a(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) parse_fail(what + " must be a non-empty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) parse_fail(what + " rows must be non-empty arrays");
    const size_t cols = j[0].size();
    Mat a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) parse_fail(what + " rows have unequal lengths");
        for (size_t c = 0; c < cols; ++c)
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                get_complex(j[r][c], what + " entry");
    }
    return a;
}

namespace {

UnitaryGroup group_from_json(const Json& j, int n, const Tolerances& tol, const std::string& what) {
    if (j.is_string()) return builtin_group(j.get<std::string>(), n, tol);
    if (j.is_array()) return close_group(matrix_list_from_json(j, n, true, what), tol);
    parse_fail(what + " must be a builtin name or an array of matrices");
}

}  // namespace

EnsembleDocument parse_ensemble_document(const std::string& text, const Tolerances& tol) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        parse_fail(std::string("malformed JSON: ") + e.what());
    }
    require_object(j, "ensemble document");
    require_known_keys(j, {"n", "states", "gu", "cgu"}, "ensemble document");

    EnsembleDocument doc;
    doc.n = get_int(require_field(j, "n", "ensemble document"), "\"n\"");
    if (doc.n < 1) parse_fail("\"n\" must be >= 1");

    const int kinds = static_cast<int>(j.contains("states")) + static_cast<int>(j.contains("gu")) +
                      static_cast<int>(j.contains("cgu"));
    if (kinds != 1) parse_fail("ensemble document needs exactly one of \"states\", \"gu\", \"cgu\"");

    if (j.contains("states")) {
        const Json& st = j["states"];
        if (!st.is_array() || st.empty()) parse_fail("\"states\" must be a non-empty array");
        std::vector<StateInput> inputs;
        inputs.reserve(st.size());
        for (size_t i = 0; i < st.size(); ++i) {
            const std::string what = "states[" + std::to_string(i) + "]";
            require_object(st[i], what);
            require_known_keys(st[i], {"prior", "matrix", "factor"}, what);
            StateInput in;
            in.prior = get_number(require_field(st[i], "prior", what), what + ".prior");
            const bool has_matrix = st[i].contains("matrix");
            const bool has_factor = st[i].contains("factor");
            if (has_matrix == has_factor)
                parse_fail(what + " needs exactly one of \"matrix\", \"factor\"");
            if (has_matrix) {
                in.matrix = square_matrix_from_json(st[i]["matrix"], doc.n, what + ".matrix");
                in.kind = StateInput::Kind::Density;
            } else {
                in.matrix = factor_from_json(st[i]["factor"], doc.n, what + ".factor");
                in.kind = StateInput::Kind::Factor;
            }
            inputs.push_back(std::move(in));
        }
        doc.states = std::move(inputs);
    } else if (j.contains("gu")) {
        const Json& g = j["gu"];
        require_object(g, "\"gu\"");
        require_known_keys(g, {"group", "generator"}, "\"gu\"");
        GuSpec spec;
        spec.group = group_from_json(require_field(g, "group", "\"gu\""), doc.n, tol, "gu.group");
        spec.generator = factor_from_json(require_field(g, "generator", "\"gu\""), doc.n, "gu.generator");
        doc.gu = std::move(spec);
    } else {
        const Json& g = j["cgu"];
        require_object(g, "\"cgu\"");
        require_known_keys(g, {"group", "generators", "generatorGroup"}, "\"cgu\"");
        CguSpec spec;
        spec.group = group_from_json(require_field(g, "group", "\"cgu\""), doc.n, tol, "cgu.group");
        spec.generators = matrix_list_from_json(require_field(g, "generators", "\"cgu\""), doc.n,
                                                false, "cgu.generators");
        if (g.contains("generatorGroup"))
            spec.generator_group =
                matrix_list_from_json(g["generatorGroup"], doc.n, true, "cgu.generatorGroup");
        doc.cgu = std::move(spec);
    }
    return doc;
}

StateEnsemble realize_ensemble(const EnsembleDocument& doc, const Tolerances& tol) {
    StateEnsemble ens;
    if (doc.states)
        ens = build_ensemble(*doc.states, tol);
    else if (doc.gu)
        ens = generate_gu(*doc.gu, tol);
    else if (doc.cgu)
        ens = generate_cgu(*doc.cgu, tol);
    else
        parse_fail("ensemble document carries no states, gu, or cgu block");
    if (ens.n != doc.n)
        parse_fail("document declares n = " + std::to_string(doc.n) + " but states have dimension " +
                   std::to_string(ens.n));
    return ens;
}

Json measurement_to_json(const RejectingMeasurement& meas) {
    Json ops = Json::array();
    for (const Mat& op : meas.ops) ops.push_back(matrix_to_json(op));
    return Json{{"n", meas.n}, {"operators", std::move(ops)}};
}

RejectingMeasurement measurement_from_json(const Json& j) {
    require_object(j, "measurement");
    require_known_keys(j, {"n", "operators"}, "measurement");
    RejectingMeasurement meas;
    meas.n = get_int(require_field(j, "n", "measurement"), "measurement.n");
    if (meas.n < 1) parse_fail("measurement.n must be >= 1");
    const Json& ops = require_field(j, "operators", "measurement");
    if (!ops.is_array() || ops.size() < 2)
        parse_fail("measurement.operators needs the inconclusive operator plus at least one outcome");
    meas.m = static_cast<int>(ops.size()) - 1;
    for (size_t i = 0; i < ops.size(); ++i)
        meas.ops.push_back(
            square_matrix_from_json(ops[i], meas.n, "measurement.operators[" + std::to_string(i) + "]"));
    return meas;
}

Json certificate_to_json(const OptimalityCertificate& cert) {
    return Json{{"x", matrix_to_json(cert.X)},
                {"delta", cert.delta},
                {"dual_value", cert.dual_value()}};
}

Json report_to_json(const ResidualReport& report) {
    return Json{{"dual_feasibility_min_eigs", report.dual_feasibility_min_eigs},
                {"slackness_sym", report.slackness_sym},
                {"slackness_raw", report.slackness_raw},
                {"gap", report.gap},
                {"p_i_deviation", report.p_i_deviation},
                {"feasible", report.feasible},
                {"optimal", report.optimal}};
}

Json solution_to_json(const SolutionDocument& doc, const std::optional<ResidualReport>& report) {
    Json j{{"beta", doc.beta},
           {"method", doc.method},
           {"p_d", doc.triple.p_d},
           {"p_e", doc.triple.p_e},
           {"p_i", doc.triple.p_i},
           {"iterations", doc.iterations},
           {"measurement", measurement_to_json(doc.measurement)}};
    if (doc.certificate) j["certificate"] = certificate_to_json(*doc.certificate);
    if (report) j["report"] = report_to_json(*report);
    return j;
}

SolutionDocument parse_solution_document(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        parse_fail(std::string("malformed JSON: ") + e.what());
    }
    require_object(j, "solution document");
    require_known_keys(j, {"beta", "method", "p_d", "p_e", "p_i", "iterations", "measurement",
                           "certificate", "report"},
                       "solution document");
    SolutionDocument doc;
    doc.beta = get_number(require_field(j, "beta", "solution document"), "\"beta\"");
    const Json& method = require_field(j, "method", "solution document");
    if (!method.is_string()) parse_fail("\"method\" must be a string");
    doc.method = method.get<std::string>();
    if (j.contains("p_d")) doc.triple.p_d = get_number(j["p_d"], "\"p_d\"");
    if (j.contains("p_e")) doc.triple.p_e = get_number(j["p_e"], "\"p_e\"");
    if (j.contains("p_i")) doc.triple.p_i = get_number(j["p_i"], "\"p_i\"");
    if (j.contains("iterations")) doc.iterations = get_int(j["iterations"], "\"iterations\"");
    doc.measurement = measurement_from_json(require_field(j, "measurement", "solution document"));
    if (j.contains("certificate")) {
        const Json& c = j["certificate"];
        require_object(c, "certificate");
        require_known_keys(c, {"x", "delta", "dual_value"}, "certificate");
        OptimalityCertificate cert;
        cert.X = square_matrix_from_json(require_field(c, "x", "certificate"), doc.measurement.n,
                                         "certificate.x");
        cert.delta = get_number(require_field(c, "delta", "certificate"), "certificate.delta");
        cert.beta = doc.beta;
        doc.certificate = std::move(cert);
    }
    if (j.contains("report") && !j["report"].is_object()) parse_fail("\"report\" must be an object");
    return doc;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "beta,p_d,p_e,p_i,gap,iters,method\n";
    for (const SweepRow& r : rows) {
        out += format_double(r.beta) + "," + format_double(r.p_d) + "," + format_double(r.p_e) + "," +
               format_double(r.p_i) + "," + format_double(r.gap) + "," + std::to_string(r.iters) +
               "," + r.method + "\n";
    }
    return out;
}

}  // namespace qsd

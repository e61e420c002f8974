#include "flownet/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flownet/errors.hpp"

namespace flownet {

using nlohmann::json;

namespace {

// Field access with a readable path in every error message.
class Reader {
public:
    std::vector<std::string> issues;

    const json& require(const json& obj, const std::string& key, const std::string& path) {
        if (!obj.is_object()) throw ParseError(path + ": expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) throw ParseError(path + "." + key + ": missing required field");
        return *it;
    }

    double number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ParseError(path + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) issues.push_back(path + ": must be finite");
        return d;
    }

    std::string string(const json& v, const std::string& path) {
        if (!v.is_string()) throw ParseError(path + ": expected a string");
        return v.get<std::string>();
    }

    const json& array(const json& v, const std::string& path) {
        if (!v.is_array()) throw ParseError(path + ": expected an array");
        return v;
    }

    // Returns SIZE_MAX and records an issue when the id is unknown.
    std::size_t link(const Multigraph& g, const json& v, const std::string& path) {
        const auto id = string(v, path);
        if (auto i = g.find_link(id)) return *i;
        issues.push_back(path + ": unknown link '" + id + "'");
        return static_cast<std::size_t>(-1);
    }
};

constexpr std::size_t kMissing = static_cast<std::size_t>(-1);

Multigraph read_graph(Reader& rd, const json& doc) {
    std::vector<std::string> nodes;
    const auto& jn = rd.array(rd.require(doc, "nodes", "$"), "$.nodes");
    for (std::size_t k = 0; k < jn.size(); ++k) nodes.push_back(rd.string(jn[k], "$.nodes[" + std::to_string(k) + "]"));

    std::map<std::string, std::size_t> node_index;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (!node_index.emplace(nodes[k], k).second) rd.issues.push_back("$.nodes: duplicate node '" + nodes[k] + "'");
    }

    std::vector<std::string> links;
    std::vector<std::size_t> tail;
    std::vector<std::size_t> head;
    std::set<std::string> seen;
    const auto& jl = rd.array(rd.require(doc, "links", "$"), "$.links");
    for (std::size_t k = 0; k < jl.size(); ++k) {
        const auto path = "$.links[" + std::to_string(k) + "]";
        const auto id = rd.string(rd.require(jl[k], "id", path), path + ".id");
        const auto t = rd.string(rd.require(jl[k], "tail", path), path + ".tail");
        const auto h = rd.string(rd.require(jl[k], "head", path), path + ".head");
        if (!seen.insert(id).second) {
            rd.issues.push_back(path + ": duplicate link '" + id + "'");
            continue;
        }
        auto ti = node_index.find(t);
        auto hi = node_index.find(h);
        if (ti == node_index.end()) rd.issues.push_back(path + ".tail: unknown node '" + t + "'");
        if (hi == node_index.end()) rd.issues.push_back(path + ".head: unknown node '" + h + "'");
        if (ti == node_index.end() || hi == node_index.end()) continue;
        if (ti->second == hi->second) {
            rd.issues.push_back(path + ": link '" + id + "' is a self-loop");
            continue;
        }
        links.push_back(id);
        tail.push_back(ti->second);
        head.push_back(hi->second);
    }
    if (!rd.issues.empty()) throw ValidationError(rd.issues);
    return Multigraph(std::move(nodes), std::move(links), std::move(tail), std::move(head));
}

Matrix read_routing(Reader& rd, const json& doc, const Multigraph& g) {
    const auto n = static_cast<Eigen::Index>(g.link_count());
    Matrix R = Matrix::Zero(n, n);
    auto it = doc.find("routing");
    if (it == doc.end()) return R;
    const auto& jr = rd.array(*it, "$.routing");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < jr.size(); ++k) {
        const auto path = "$.routing[" + std::to_string(k) + "]";
        const auto from = rd.link(g, rd.require(jr[k], "from", path), path + ".from");
        const auto to = rd.link(g, rd.require(jr[k], "to", path), path + ".to");
        const double f = rd.number(rd.require(jr[k], "fraction", path), path + ".fraction");
        if (from == kMissing || to == kMissing) continue;
        if (!seen.emplace(from, to).second) {
            rd.issues.push_back(path + ": duplicate routing entry " + g.links()[from] + " -> " + g.links()[to]);
            continue;
        }
        if (f < 0.0) rd.issues.push_back(path + ".fraction: must be >= 0");
        R(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) = f;
    }
    return R;
}

InflowSignal read_inflow(Reader& rd, const json& doc, const Multigraph& g) {
    const auto n = static_cast<Eigen::Index>(g.link_count());
    auto it = doc.find("inflows");
    if (it == doc.end()) return InflowSignal::constant(Vector::Zero(n));

    struct Series {
        std::size_t link;
        std::vector<double> bps;
        std::vector<double> vals;
    };
    std::vector<Series> series;
    std::set<double> all_bps{0.0};
    std::set<std::size_t> seen;
    const auto& ji = rd.array(*it, "$.inflows");
    for (std::size_t k = 0; k < ji.size(); ++k) {
        const auto path = "$.inflows[" + std::to_string(k) + "]";
        Series s;
        s.link = rd.link(g, rd.require(ji[k], "link", path), path + ".link");
        const auto& jb = rd.array(rd.require(ji[k], "breakpoints", path), path + ".breakpoints");
        const auto& jv = rd.array(rd.require(ji[k], "values", path), path + ".values");
        for (std::size_t m = 0; m < jb.size(); ++m)
            s.bps.push_back(rd.number(jb[m], path + ".breakpoints[" + std::to_string(m) + "]"));
        for (std::size_t m = 0; m < jv.size(); ++m)
            s.vals.push_back(rd.number(jv[m], path + ".values[" + std::to_string(m) + "]"));
        if (s.link == kMissing) continue;
        if (!seen.insert(s.link).second) {
            rd.issues.push_back(path + ": link '" + g.links()[s.link] + "' has two inflow entries");
            continue;
        }
        bool good = true;
        if (s.bps.empty() || s.bps.size() != s.vals.size()) {
            rd.issues.push_back(path + ": breakpoints and values must be non-empty and of equal length");
            good = false;
        } else if (s.bps.front() != 0.0) {
            rd.issues.push_back(path + ".breakpoints: must start at 0");
            good = false;
        }
        for (std::size_t m = 1; good && m < s.bps.size(); ++m) {
            if (!(s.bps[m] > s.bps[m - 1])) {
                rd.issues.push_back(path + ".breakpoints: must be strictly increasing");
                good = false;
            }
        }
        for (double v : s.vals) {
            if (good && v < 0.0) {
                rd.issues.push_back(path + ".values: inflow must be >= 0");
                good = false;
            }
        }
        if (!good) continue;
        all_bps.insert(s.bps.begin(), s.bps.end());
        series.push_back(std::move(s));
    }

    std::vector<double> bps(all_bps.begin(), all_bps.end());
    Matrix values = Matrix::Zero(static_cast<Eigen::Index>(bps.size()), n);
    for (const auto& s : series) {
        for (std::size_t b = 0; b < bps.size(); ++b) {
            auto up = std::upper_bound(s.bps.begin(), s.bps.end(), bps[b]);
            const auto seg = static_cast<std::size_t>(up - s.bps.begin()) - 1;
            values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(s.link)) = s.vals[seg];
        }
    }
    if (!values.allFinite()) return InflowSignal::constant(Vector::Zero(n));
    return InflowSignal(std::move(bps), std::move(values));
}

Demand read_demand(Reader& rd, const json& j, const std::string& path) {
    Demand d;
    const auto type = rd.string(rd.require(j, "type", path), path + ".type");
    if (type == "linear") {
        d.kind = Demand::Kind::Linear;
        d.slope = j.contains("slope") ? rd.number(j["slope"], path + ".slope") : 1.0;
        if (!(d.slope > 0.0)) rd.issues.push_back(path + ".slope: must be positive");
    } else if (type == "saturating") {
        d.kind = Demand::Kind::Saturating;
        d.capacity = rd.number(rd.require(j, "capacity", path), path + ".capacity");
        d.kappa = rd.number(rd.require(j, "kappa", path), path + ".kappa");
        if (!(d.capacity > 0.0)) rd.issues.push_back(path + ".capacity: must be positive");
        if (!(d.kappa > 0.0)) rd.issues.push_back(path + ".kappa: must be positive");
    } else {
        rd.issues.push_back(path + ".type: unknown demand type '" + type + "'");
    }
    return d;
}

Supply read_supply(Reader& rd, const json& j, const std::string& path) {
    Supply s;
    s.max_flow = j.contains("max_flow") ? rd.number(j["max_flow"], path + ".max_flow") : 1.0;
    s.slope = j.contains("slope") ? rd.number(j["slope"], path + ".slope") : 1.0;
    if (!(s.max_flow >= 0.0)) rd.issues.push_back(path + ".max_flow: must be >= 0");
    if (!(s.slope >= 0.0)) rd.issues.push_back(path + ".slope: must be >= 0");
    return s;
}

std::vector<ControllerConfig> read_controllers(Reader& rd, const json& doc, const Multigraph& g) {
    std::vector<ControllerConfig> out;
    const auto& jc = rd.array(rd.require(doc, "controllers", "$"), "$.controllers");
    for (std::size_t k = 0; k < jc.size(); ++k) {
        const auto path = "$.controllers[" + std::to_string(k) + "]";
        const auto kind = rd.string(rd.require(jc[k], "kind", path), path + ".kind");
        bool good = true;
        const auto link_list = [&](const json& arr, const std::string& p) {
            std::vector<std::size_t> ids;
            const auto& a = rd.array(arr, p);
            for (std::size_t m = 0; m < a.size(); ++m) {
                const auto i = rd.link(g, a[m], p + "[" + std::to_string(m) + "]");
                if (i == kMissing) good = false;
                ids.push_back(i);
            }
            return ids;
        };

        if (kind == "constant") {
            ConstantSpec c;
            c.links = link_list(rd.require(jc[k], "links", path), path + ".links");
            if (jc[k].contains("value")) {
                const double v = rd.number(jc[k]["value"], path + ".value");
                c.values.assign(c.links.size(), v);
            } else {
                const auto& jv = rd.array(rd.require(jc[k], "values", path), path + ".values");
                for (std::size_t m = 0; m < jv.size(); ++m)
                    c.values.push_back(rd.number(jv[m], path + ".values[" + std::to_string(m) + "]"));
            }
            if (c.values.size() != c.links.size()) {
                rd.issues.push_back(path + ": one value per link required");
                good = false;
            }
            for (double v : c.values) {
                if (v < 0.0) {
                    rd.issues.push_back(path + ".values: must be >= 0");
                    good = false;
                    break;
                }
            }
            if (good) out.emplace_back(std::move(c));
        } else if (kind == "gpa") {
            GpaPhaseSpec gpa;
            gpa.kappa = rd.number(rd.require(jc[k], "kappa", path), path + ".kappa");
            if (!(gpa.kappa > 0.0)) {
                rd.issues.push_back(path + ".kappa: must be positive");
                good = false;
            }
            const auto& jp = rd.array(rd.require(jc[k], "phases", path), path + ".phases");
            for (std::size_t m = 0; m < jp.size(); ++m) {
                gpa.phases.push_back(link_list(jp[m], path + ".phases[" + std::to_string(m) + "]"));
            }
            if (good) out.emplace_back(std::move(gpa));
        } else if (kind == "ctm") {
            CtmSpec ctm;
            const auto& jl = rd.array(rd.require(jc[k], "links", path), path + ".links");
            for (std::size_t m = 0; m < jl.size(); ++m) {
                const auto p = path + ".links[" + std::to_string(m) + "]";
                CtmLinkSpec s;
                s.link = rd.link(g, rd.require(jl[m], "link", p), p + ".link");
                s.downstream = rd.link(g, rd.require(jl[m], "downstream", p), p + ".downstream");
                s.demand = read_demand(rd, rd.require(jl[m], "demand", p), p + ".demand");
                s.supply = jl[m].contains("supply") ? read_supply(rd, jl[m]["supply"], p + ".supply") : Supply{};
                if (s.link == kMissing || s.downstream == kMissing) good = false;
                ctm.links.push_back(s);
            }
            if (good) out.emplace_back(std::move(ctm));
        } else {
            rd.issues.push_back(path + ".kind: unknown controller kind '" + kind + "'");
        }
    }
    return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    const auto end = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("$: scenario must be a JSON object");
    Reader rd;
    Scenario s;
    if (doc.contains("name")) s.name = rd.string(doc["name"], "$.name");

    s.routing.graph = read_graph(rd, doc);
    const auto& g = s.routing.graph;
    const auto n = static_cast<Eigen::Index>(g.link_count());
    s.routing.R = read_routing(rd, doc, g);
    s.inflow = read_inflow(rd, doc, g);
    s.controllers = read_controllers(rd, doc, g);

    s.x0 = Vector::Zero(n);
    if (doc.contains("initial")) {
        const auto& ji = doc["initial"];
        if (!ji.is_object()) throw ParseError("$.initial: expected an object mapping link id to volume");
        for (auto it = ji.begin(); it != ji.end(); ++it) {
            const auto path = "$.initial." + it.key();
            const double v = rd.number(it.value(), path);
            if (auto i = g.find_link(it.key())) {
                s.x0(static_cast<Eigen::Index>(*i)) = v;
            } else {
                rd.issues.push_back(path + ": unknown link '" + it.key() + "'");
            }
        }
    }

    s.horizon = rd.number(rd.require(doc, "horizon", "$"), "$.horizon");
    s.step = rd.number(rd.require(doc, "step", "$"), "$.step");
    if (doc.contains("tolerances")) {
        const auto& jt = doc["tolerances"];
        if (jt.contains("picard")) s.tolerances.picard = rd.number(jt["picard"], "$.tolerances.picard");
        if (jt.contains("psi")) s.tolerances.psi = rd.number(jt["psi"], "$.tolerances.psi");
        if (jt.contains("row_sum")) s.tolerances.row_sum = rd.number(jt["row_sum"], "$.tolerances.row_sum");
    }

    if (!rd.issues.empty()) {
        // Semantic checks on what could be read, so the user sees everything at once.
        if (s.routing.R.allFinite()) {
            for (auto& m : validate_routing(s.routing).messages()) rd.issues.push_back("routing: " + m);
        }
        throw ValidationError(rd.issues);
    }
    finalize_scenario(s);
    return s;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    try {
        return scenario_from_json(doc);
    } catch (const ParseError& e) {
        throw ParseError(source + ": " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

json scenario_to_json(const Scenario& s) {
    const auto& g = s.routing.graph;
    const auto& ids = g.links();
    json doc;
    if (!s.name.empty()) doc["name"] = s.name;
    doc["nodes"] = g.nodes();
    doc["links"] = json::array();
    for (std::size_t i = 0; i < g.link_count(); ++i) {
        doc["links"].push_back({{"id", ids[i]}, {"tail", g.nodes()[g.tail(i)]}, {"head", g.nodes()[g.head(i)]}});
    }
    doc["routing"] = json::array();
    for (Eigen::Index i = 0; i < s.routing.R.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.routing.R.cols(); ++j) {
            if (s.routing.R(i, j) != 0.0) {
                doc["routing"].push_back({{"from", ids[static_cast<std::size_t>(i)]},
                                          {"to", ids[static_cast<std::size_t>(j)]},
                                          {"fraction", s.routing.R(i, j)}});
            }
        }
    }
    doc["inflows"] = json::array();
    const auto& V = s.inflow.values();
    for (Eigen::Index i = 0; i < V.cols(); ++i) {
        if ((V.col(i).array() == 0.0).all()) continue;
        std::vector<double> vals(V.col(i).data(), V.col(i).data() + V.rows());
        doc["inflows"].push_back(
            {{"link", ids[static_cast<std::size_t>(i)]}, {"breakpoints", s.inflow.breakpoints()}, {"values", vals}});
    }
    doc["controllers"] = json::array();
    const auto names = [&](const std::vector<std::size_t>& v) {
        std::vector<std::string> out;
        for (auto i : v) out.push_back(ids[i]);
        return out;
    };
    for (const auto& c : s.controllers) {
        if (const auto* k = std::get_if<ConstantSpec>(&c)) {
            doc["controllers"].push_back({{"kind", "constant"}, {"links", names(k->links)}, {"values", k->values}});
        } else if (const auto* gp = std::get_if<GpaPhaseSpec>(&c)) {
            json phases = json::array();
            for (const auto& p : gp->phases) phases.push_back(names(p));
            doc["controllers"].push_back({{"kind", "gpa"}, {"kappa", gp->kappa}, {"phases", phases}});
        } else if (const auto* ctm = std::get_if<CtmSpec>(&c)) {
            json links = json::array();
            for (const auto& l : ctm->links) {
                json demand = l.demand.kind == Demand::Kind::Linear
                                  ? json{{"type", "linear"}, {"slope", l.demand.slope}}
                                  : json{{"type", "saturating"}, {"capacity", l.demand.capacity}, {"kappa", l.demand.kappa}};
                links.push_back({{"link", ids[l.link]},
                                 {"downstream", ids[l.downstream]},
                                 {"demand", demand},
                                 {"supply", {{"max_flow", l.supply.max_flow}, {"slope", l.supply.slope}}}});
            }
            doc["controllers"].push_back({{"kind", "ctm"}, {"links", links}});
        }
    }
    doc["initial"] = json::object();
    for (std::size_t i = 0; i < ids.size(); ++i) doc["initial"][ids[i]] = s.x0(static_cast<Eigen::Index>(i));
    doc["horizon"] = s.horizon;
    doc["step"] = s.step;
    doc["tolerances"] = {{"picard", s.tolerances.picard}, {"psi", s.tolerances.psi}, {"row_sum", s.tolerances.row_sum}};
    return doc;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_scenario(const Scenario& s, const std::filesystem::path& path) {
    write_file_atomic(path, scenario_to_json(s).dump(2) + "\n");
}

std::string trajectory_csv(const Scenario& s, const Solution& sol) {
    const auto& ids = s.routing.graph.links();
    std::string out = "t";
    for (const char* prefix : {"x_", "z_", "zeta_", "w_"})
        for (const auto& id : ids) out += std::string(",") + prefix + id;
    out += '\n';
    const std::array<const Matrix*, 4> blocks{&sol.x.values, &sol.z.values, &sol.zeta.values, &sol.w.values};
    for (std::size_t k = 0; k < sol.grid.samples(); ++k) {
        out += format_double(sol.grid.time(k));
        for (const auto* m : blocks) {
            for (Eigen::Index i = 0; i < m->cols(); ++i) {
                out += ',';
                out += format_double((*m)(static_cast<Eigen::Index>(k), i));
            }
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv: empty input");
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            char* end = nullptr;
            row.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) throw ParseError("csv:" + std::to_string(lineno) + ": not a number");
        }
        if (row.size() != t.header.size()) throw ParseError("csv:" + std::to_string(lineno) + ": wrong column count");
        rows.push_back(std::move(row));
    }
    t.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            t.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return t;
}

json solve_report_json(const Scenario& s, const Solution& sol) {
    const auto& r = sol.report;
    long total = 0;
    int worst = 0;
    for (int it : r.picard_iterations) {
        total += it;
        worst = std::max(worst, it);
    }
    json j;
    j["scenario"] = s.name;
    j["links"] = s.routing.graph.links();
    j["horizon"] = s.horizon;
    j["step"] = r.step;
    j["certificates"] = {{"rho", r.sizing.rho},
                         {"transfer_norm", r.sizing.transfer_norm},
                         {"controller_lipschitz", s.controller->lipschitz()},
                         {"weighted_lipschitz", r.sizing.lipschitz},
                         {"norm_distortion", r.distortion},
                         {"varpi", r.sizing.varpi},
                         {"phi", r.sizing.phi},
                         {"contraction", r.sizing.safety},
                         {"window_length", r.sizing.length},
                         {"window_steps", r.window_steps}};
    j["picard"] = {{"windows", r.picard_iterations.size()},
                   {"max_iterations", worst},
                   {"total_iterations", total},
                   {"max_residual", r.max_residual}};
    j["psi"] = {{"max_iterations", r.max_psi_iterations}};
    j["max_clamp"] = r.max_clamp;
    return j;
}

json invariant_report_json(const InvariantReport& r) {
    json arr = json::array();
    for (const auto& c : r.checks) {
        arr.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"worst", c.worst},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
    }
    return arr;
}

std::string volumes_csv(const Scenario& s, const Solution& sol, std::size_t stride) {
    stride = std::max<std::size_t>(stride, 1);
    std::string out = "t";
    for (const auto& id : s.routing.graph.links()) out += ",x_" + id;
    out += '\n';
    for (std::size_t k = 0; k < sol.grid.samples(); k += stride) {
        out += format_double(sol.grid.time(k));
        for (Eigen::Index i = 0; i < sol.x.values.cols(); ++i)
            out += "," + format_double(sol.x.values(static_cast<Eigen::Index>(k), i));
        out += '\n';
    }
    return out;
}

std::string controls_csv(const Scenario& s, const Solution& sol, const Vector& equilibrium, std::size_t stride) {
    stride = std::max<std::size_t>(stride, 1);
    std::string out = "t";
    for (const auto& id : s.routing.graph.links()) out += ",zeta_" + id;
    for (const auto& id : s.routing.graph.links()) out += ",a_" + id;
    out += '\n';
    for (std::size_t k = 0; k < sol.grid.samples(); k += stride) {
        out += format_double(sol.grid.time(k));
        for (Eigen::Index i = 0; i < sol.zeta.values.cols(); ++i)
            out += "," + format_double(sol.zeta.values(static_cast<Eigen::Index>(k), i));
        for (Eigen::Index i = 0; i < equilibrium.size(); ++i) out += "," + format_double(equilibrium(i));
        out += '\n';
    }
    return out;
}

}  // namespace flownet

#include "drmdp/model_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace drmdp::io {

using json = nlohmann::json;
using geom::Halfspace;
using geom::PolyhedralSet;
using geom::PwlConvexFn;

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

/// Maps JSON pointers to byte offsets of their key (object members) or value
/// (array elements). Built lazily, only when an error needs a location.
class Locator {
public:
    explicit Locator(const std::string& text) : text_(text) {}

    std::string where(const std::string& pointer) const {
        if (!built_) {
            built_ = true;
            std::size_t i = 0;
            try {
                value(i, "");
            } catch (...) {
            }
        }
        auto it = pos_.find(pointer);
        std::string p = pointer;
        while (it == pos_.end() && !p.empty()) {
            p = p.substr(0, p.rfind('/'));
            it = pos_.find(p);
        }
        return at_offset(it == pos_.end() ? 0 : it->second);
    }

    std::string at_offset(std::size_t off) const {
        off = std::min(off, text_.size());
        int line = 1;
        std::size_t line_start = 0;
        for (std::size_t i = 0; i < off; ++i)
            if (text_[i] == '\n') {
                ++line;
                line_start = i + 1;
            }
        return "line " + std::to_string(line) + ", column " + std::to_string(off - line_start + 1);
    }

private:
    void ws(std::size_t& i) const {
        while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
    }

    std::string string_token(std::size_t& i) const {
        std::string out;
        ++i;
        while (i < text_.size() && text_[i] != '"') {
            if (text_[i] == '\\' && i + 1 < text_.size()) {
                out += text_[i + 1];
                i += 2;
            } else {
                out += text_[i++];
            }
        }
        ++i;
        return out;
    }

    void value(std::size_t& i, const std::string& ptr) const {
        ws(i);
        pos_.emplace(ptr, i);
        if (i >= text_.size()) return;
        const char c = text_[i];
        if (c == '{') {
            ++i;
            for (;;) {
                ws(i);
                if (i >= text_.size() || text_[i] == '}') break;
                if (text_[i] == ',') {
                    ++i;
                    continue;
                }
                const std::size_t key_pos = i;
                const std::string key = string_token(i);
                const std::string child = ptr + "/" + escape_token(key);
                pos_.emplace(child, key_pos);
                ws(i);
                ++i; // ':'
                value(i, child);
            }
            ++i;
        } else if (c == '[') {
            ++i;
            int idx = 0;
            for (;;) {
                ws(i);
                if (i >= text_.size() || text_[i] == ']') break;
                if (text_[i] == ',') {
                    ++i;
                    continue;
                }
                value(i, ptr + "/" + std::to_string(idx++));
            }
            ++i;
        } else if (c == '"') {
            string_token(i);
        } else {
            while (i < text_.size() && text_[i] != ',' && text_[i] != '}' && text_[i] != ']' &&
                   !std::isspace(static_cast<unsigned char>(text_[i])))
                ++i;
        }
    }

    const std::string& text_;
    mutable bool built_ = false;
    mutable std::map<std::string, std::size_t> pos_;
};

class Node {
public:
    Node(const json& j, std::string path, const Locator& loc) : j_(j), path_(std::move(path)), loc_(loc) {}

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::Parse, loc_.where(path_) + ": " + msg + " (at " + (path_.empty() ? "/" : path_) + ")");
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

    Node at(const char* key) const {
        object();
        if (!j_.contains(key)) error(std::string("missing key \"") + key + "\"");
        return child(key);
    }

    std::optional<Node> get(const char* key) const {
        object();
        if (!j_.contains(key)) return std::nullopt;
        return child(key);
    }

    void object() const {
        if (!j_.is_object()) error("expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        object();
        for (const auto& [k, v] : j_.items()) {
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; });
            if (!known) Node(v, path_ + "/" + escape_token(k), loc_).error("unknown key \"" + k + "\"");
        }
    }

    std::vector<Node> items() const {
        if (!j_.is_array()) error("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "/" + std::to_string(i), loc_);
        return out;
    }

    double number() const {
        if (j_.is_number()) return j_.get<double>();
        if (j_.is_string()) {
            const auto s = j_.get<std::string>();
            if (s == "inf" || s == "infinity" || s == "+inf") return lp::kInf;
            if (s == "-inf" || s == "-infinity") return -lp::kInf;
        }
        error("expected a number");
    }

    double finite() const {
        const double v = number();
        if (!std::isfinite(v)) error("expected a finite number");
        return v;
    }

    int integer() const {
        if (!j_.is_number_integer()) error("expected an integer");
        return j_.get<int>();
    }

    bool boolean() const {
        if (!j_.is_boolean()) error("expected true or false");
        return j_.get<bool>();
    }

    std::string str() const {
        if (!j_.is_string()) error("expected a string");
        return j_.get<std::string>();
    }

    numvec vec() const {
        numvec out;
        for (const auto& n : items()) out.push_back(n.number());
        return out;
    }

    std::vector<numvec> matrix() const {
        std::vector<numvec> out;
        for (const auto& n : items()) out.push_back(n.vec());
        return out;
    }

    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (const auto& n : items()) out.push_back(n.str());
        return out;
    }

    /// Runs `body`, relocating library errors to this node.
    template <class F>
    auto guard(F&& body) const {
        try {
            return body();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Parse) throw;
            throw Error(e.kind(), loc_.where(path_) + ": " + e.what() + " (at " + (path_.empty() ? "/" : path_) + ")");
        }
    }

private:
    Node child(const char* key) const { return Node(j_.at(key), path_ + "/" + escape_token(key), loc_); }

    const json& j_;
    std::string path_;
    const Locator& loc_;
};

std::vector<Halfspace> rows_of(const Node& n, int width) {
    std::vector<Halfspace> out;
    for (const auto& r : n.items()) {
        r.allow({"a", "b"});
        Halfspace h{r.at("a").vec(), r.at("b").finite()};
        if (static_cast<int>(h.a.size()) != width)
            r.at("a").error("row has " + std::to_string(h.a.size()) + " entries, expected " + std::to_string(width));
        out.push_back(std::move(h));
    }
    return out;
}

PolyhedralSet parse_set(const Node& n) {
    n.object();
    if (n.has("box")) {
        n.allow({"box"});
        const Node b = n.at("box");
        b.allow({"lo", "hi"});
        return b.guard([&] { return PolyhedralSet::box(b.at("lo").vec(), b.at("hi").vec()); });
    }
    if (n.has("simplex")) {
        n.allow({"simplex"});
        const int d = n.at("simplex").integer();
        if (d < 1) n.at("simplex").error("simplex dimension must be positive");
        return PolyhedralSet::simplex(d);
    }
    if (n.has("point")) {
        n.allow({"point"});
        return n.guard([&] { return PolyhedralSet::point(n.at("point").vec()); });
    }
    n.allow({"dim", "aux_dim", "ineq", "eq"});
    const int dim = n.at("dim").integer();
    const int aux = n.get("aux_dim") ? n.at("aux_dim").integer() : 0;
    if (dim < 1) n.at("dim").error("dimension must be positive");
    if (aux < 0) n.at("aux_dim").error("auxiliary dimension must be nonnegative");
    const auto ineq = n.get("ineq") ? rows_of(n.at("ineq"), dim + aux) : std::vector<Halfspace>{};
    const auto eq = n.get("eq") ? rows_of(n.at("eq"), dim + aux) : std::vector<Halfspace>{};
    return n.guard([&] { return PolyhedralSet(dim, ineq, eq, aux); });
}

PwlConvexFn parse_pwl(const Node& n) {
    n.object();
    if (n.has("l1_distance")) {
        n.allow({"l1_distance"});
        return PwlConvexFn::l1_distance(n.at("l1_distance").vec());
    }
    if (n.has("linf_distance")) {
        n.allow({"linf_distance"});
        return PwlConvexFn::linf_distance(n.at("linf_distance").vec());
    }
    if (n.has("affine") || n.has("abs_affine")) {
        const bool abs = n.has("abs_affine");
        n.allow({abs ? "abs_affine" : "affine"});
        const Node body = n.at(abs ? "abs_affine" : "affine");
        body.allow({"a", "b"});
        const numvec a = body.at("a").vec();
        const double b = body.at("b").finite();
        return body.guard([&] { return abs ? PwlConvexFn::abs_affine(a, b) : PwlConvexFn::affine(a, b); });
    }
    n.allow({"dim", "blocks"});
    const int dim = n.at("dim").integer();
    std::vector<std::vector<geom::AffinePiece>> blocks;
    for (const auto& blk : n.at("blocks").items()) {
        blocks.emplace_back();
        for (const auto& p : blk.items()) {
            p.allow({"a", "b"});
            blocks.back().push_back({p.at("a").vec(), p.at("b").finite()});
        }
    }
    return n.guard([&] { return PwlConvexFn(dim, blocks); });
}

amb::Norm parse_norm(const Node& n) {
    const auto s = n.str();
    if (s == "l1" || s == "1") return amb::Norm::L1;
    if (s == "linf" || s == "inf") return amb::Norm::LInf;
    n.error("metric must be \"l1\" or \"linf\"");
}

amb::LiftedAmbiguitySet parse_ambiguity(const Node& n) {
    const std::string builder = n.at("builder").str();
    auto norm_or = [&](const char* key) { return n.get(key) ? parse_norm(n.at(key)) : amb::Norm::L1; };
    if (builder == "support_only") {
        n.allow({"builder", "support"});
        const auto D = parse_set(n.at("support"));
        return n.guard([&] { return amb::build_support_only(D); });
    }
    if (builder == "uncertain_mean") {
        n.allow({"builder", "support", "mean_lo", "mean_hi", "center", "theta", "norm"});
        const auto D = parse_set(n.at("support"));
        const auto lo = n.at("mean_lo").vec();
        const auto hi = n.at("mean_hi").vec();
        const auto c = n.at("center").vec();
        const double theta = n.at("theta").number();
        const auto norm = norm_or("norm");
        return n.guard([&] { return amb::build_uncertain_mean(D, lo, hi, c, theta, norm); });
    }
    if (builder == "phi_divergence_tv") {
        n.allow({"builder", "samples", "theta"});
        const auto samples = n.at("samples").matrix();
        const double theta = n.at("theta").number();
        return n.guard([&] { return amb::build_phi_divergence_tv(samples, theta); });
    }
    if (builder == "phi_divergence") {
        n.allow({"builder", "samples", "theta", "phi"});
        const auto samples = n.at("samples").matrix();
        const double theta = n.at("theta").number();
        std::vector<amb::PhiPiece> phi;
        for (const auto& p : n.at("phi").items()) {
            const auto v = p.vec();
            if (v.size() != 2) p.error("each phi piece is [slope, intercept]");
            phi.push_back({v[0], v[1]});
        }
        return n.guard([&] { return amb::build_phi_divergence(samples, theta, phi); });
    }
    if (builder == "wasserstein") {
        n.allow({"builder", "samples", "theta", "support", "metric"});
        const auto samples = n.at("samples").matrix();
        const double theta = n.at("theta").number();
        const auto D = parse_set(n.at("support"));
        const auto norm = norm_or("metric");
        return n.guard([&] { return amb::build_wasserstein(samples, theta, D, norm); });
    }
    if (builder == "hybrid_wasserstein_mad") {
        n.allow({"builder", "samples", "theta", "support", "metric", "mean_lo", "mean_hi", "center", "mad_bound"});
        const auto samples = n.at("samples").matrix();
        const double theta = n.at("theta").number();
        const auto D = parse_set(n.at("support"));
        const auto norm = norm_or("metric");
        amb::HybridOptions opts;
        opts.mean_lo = n.at("mean_lo").vec();
        opts.mean_hi = n.at("mean_hi").vec();
        if (n.get("center")) opts.center = n.at("center").vec();
        if (n.get("mad_bound")) opts.mad_bound = n.at("mad_bound").number();
        return n.guard([&] { return amb::build_hybrid_wasserstein_mad(samples, theta, D, norm, opts); });
    }
    if (builder == "mixture") {
        n.allow({"builder", "components", "weights"});
        std::vector<amb::MixtureComponent> comps;
        for (const auto& c : n.at("components").items()) {
            c.allow({"support", "mean_lo", "mean_hi", "g", "g_bound"});
            amb::MixtureComponent mc;
            mc.support = parse_set(c.at("support"));
            if (c.get("mean_lo")) mc.mean_lo = c.at("mean_lo").vec();
            if (c.get("mean_hi")) mc.mean_hi = c.at("mean_hi").vec();
            if (c.get("g"))
                for (const auto& f : c.at("g").items()) mc.g.push_back(parse_pwl(f));
            if (c.get("g_bound")) mc.g_bound = c.at("g_bound").vec();
            comps.push_back(std::move(mc));
        }
        const auto W = parse_set(n.at("weights"));
        return n.guard([&] { return amb::build_mixture(comps, W); });
    }
    if (builder == "lifted") {
        n.allow({"builder", "factor_dim", "supports", "groups", "weights"});
        amb::LiftedAmbiguitySet a;
        a.factor_dim = n.at("factor_dim").integer();
        for (const auto& s : n.at("supports").items()) a.supports.push_back(parse_set(s));
        if (n.get("groups"))
            for (const auto& g : n.at("groups").items()) {
                g.allow({"scenarios", "mean_equality", "g", "moments"});
                amb::ConditionGroup grp;
                for (const auto& s : g.at("scenarios").items()) grp.scenarios.push_back(s.integer());
                grp.mean_equality = g.get("mean_equality") ? g.at("mean_equality").boolean() : false;
                if (g.get("g")) {
                    for (const auto& per : g.at("g").items()) {
                        grp.g.emplace_back();
                        for (const auto& f : per.items()) grp.g.back().push_back(parse_pwl(f));
                    }
                } else {
                    grp.g.assign(grp.scenarios.size(), {});
                }
                grp.moments = parse_set(g.at("moments"));
                a.groups.push_back(std::move(grp));
            }
        a.weights = parse_set(n.at("weights"));
        return a;
    }
    n.at("builder").error("unknown builder \"" + builder + "\"");
}

Eigen::MatrixXd parse_matrix(const Node& n, int rows, int cols) {
    const auto m = n.matrix();
    if (static_cast<int>(m.size()) != rows)
        n.error("expected " + std::to_string(rows) + " rows, found " + std::to_string(m.size()));
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(m[i].size()) != cols)
            n.items()[i].error("expected " + std::to_string(cols) + " columns, found " + std::to_string(m[i].size()));
        for (int c = 0; c < cols; ++c) out(i, c) = m[i][c];
    }
    return out;
}

Eigen::VectorXd parse_vector(const Node& n, int size) {
    const auto v = n.vec();
    if (static_cast<int>(v.size()) != size)
        n.error("expected " + std::to_string(size) + " entries, found " + std::to_string(v.size()));
    return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

amb::FactorMap parse_factor_map(const Node& n, int actions, int successors) {
    n.allow({"dim", "P", "p0", "R", "r0"});
    const int k = n.at("dim").integer();
    if (k < 1) n.at("dim").error("factor dimension must be positive");
    amb::FactorMap fm;
    fm.actions = actions;
    fm.successors = successors;
    const int np = actions * successors;
    fm.P = n.get("P") ? parse_matrix(n.at("P"), np, k) : Eigen::MatrixXd::Zero(np, k);
    fm.p0 = n.get("p0") ? parse_vector(n.at("p0"), np) : Eigen::VectorXd::Zero(np);
    fm.R = n.get("R") ? parse_matrix(n.at("R"), actions, k) : Eigen::MatrixXd::Zero(actions, k);
    fm.r0 = n.get("r0") ? parse_vector(n.at("r0"), actions) : Eigen::VectorXd::Zero(actions);
    return fm;
}

DrMdpModel parse_document(const json& doc, const Locator& loc) {
    const Node root(doc, "", loc);
    root.allow({"format", "version", "horizon", "initial", "states"});
    if (root.at("format").str() != "drmdp-model") root.at("format").error("format must be \"drmdp-model\"");
    if (root.at("version").integer() != 1) root.at("version").error("unsupported version");

    const Node hz = root.at("horizon");
    const std::string type = hz.at("type").str();
    if (type == "finite") hz.allow({"type", "stages"});
    else if (type == "finite_stationary") hz.allow({"type", "periods"});
    else if (type == "infinite") hz.allow({"type", "discount"});
    else hz.at("type").error("horizon type must be finite, finite_stationary or infinite");

    const auto state_nodes = root.at("states").items();
    if (state_nodes.empty()) root.at("states").error("at least one state is required");
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < state_nodes.size(); ++i) {
        const auto name = state_nodes[i].at("name").str();
        if (!index.emplace(name, static_cast<int>(i)).second)
            state_nodes[i].at("name").error("duplicate state name \"" + name + "\"");
    }
    const Node init = root.at("initial");
    const auto init_it = index.find(init.str());
    if (init_it == index.end()) init.error("unknown initial state \"" + init.str() + "\"");

    std::vector<State> states;
    numvec terminal;
    for (const auto& sn : state_nodes) {
        sn.allow({"name", "stage", "actions", "successors", "terminal", "factor_map", "ambiguity"});
        State st;
        st.name = sn.at("name").str();
        if (type == "finite") st.stage = sn.at("stage").integer();
        else if (sn.get("stage")) sn.at("stage").error("stage is only used by finite horizons");
        if (sn.get("actions")) st.actions = sn.at("actions").strings();
        if (sn.get("successors"))
            for (const auto& s : sn.at("successors").items()) {
                const auto it = index.find(s.str());
                if (it == index.end()) s.error("unknown successor \"" + s.str() + "\"");
                st.successors.push_back(it->second);
            }
        terminal.push_back(sn.get("terminal") ? sn.at("terminal").finite() : 0.0);
        if (type == "infinite" && sn.get("terminal")) sn.at("terminal").error("terminal values need a finite horizon");
        if (!st.actions.empty()) {
            st.factors = parse_factor_map(sn.at("factor_map"), static_cast<int>(st.actions.size()),
                                          static_cast<int>(st.successors.size()));
            st.ambiguity = parse_ambiguity(sn.at("ambiguity"));
        } else {
            for (const char* k : {"successors", "factor_map", "ambiguity"})
                if (sn.get(k)) sn.at(k).error(std::string(k) + " given for a state without actions");
        }
        states.push_back(std::move(st));
    }

    if (type == "finite_stationary") {
        StationaryDescription desc;
        desc.states = std::move(states);
        desc.terminal = std::move(terminal);
        desc.periods = hz.at("periods").integer();
        desc.initial = init_it->second;
        return hz.guard([&] { return expand_stationary(desc); });
    }
    DrMdpModel m;
    m.states = std::move(states);
    m.initial = init_it->second;
    if (type == "finite") {
        m.horizon = Horizon::Finite;
        m.stages = hz.at("stages").integer();
        m.terminal = std::move(terminal);
    } else {
        m.horizon = Horizon::Infinite;
        m.discount = hz.at("discount").finite();
        m.terminal.assign(m.states.size(), 0.0);
    }
    return m;
}

json set_json(const PolyhedralSet& s) {
    auto rows = [](const std::vector<Halfspace>& hs) {
        json arr = json::array();
        for (const auto& h : hs) arr.push_back({{"a", h.a}, {"b", h.b}});
        return arr;
    };
    json j = {{"dim", s.dim()}, {"ineq", rows(s.ineq())}, {"eq", rows(s.eq())}};
    if (s.aux_dim() > 0) j["aux_dim"] = s.aux_dim();
    return j;
}

json pwl_json(const PwlConvexFn& f) {
    json blocks = json::array();
    for (const auto& blk : f.blocks()) {
        json b = json::array();
        for (const auto& p : blk) b.push_back({{"a", p.a}, {"b", p.b}});
        blocks.push_back(b);
    }
    return {{"dim", f.dim()}, {"blocks", blocks}};
}

json ambiguity_json(const amb::LiftedAmbiguitySet& a) {
    json supports = json::array();
    for (const auto& s : a.supports) supports.push_back(set_json(s));
    json groups = json::array();
    for (const auto& g : a.groups) {
        json gs = json::array();
        for (const auto& per : g.g) {
            json fs = json::array();
            for (const auto& f : per) fs.push_back(pwl_json(f));
            gs.push_back(fs);
        }
        groups.push_back({{"scenarios", g.scenarios},
                          {"mean_equality", g.mean_equality},
                          {"g", gs},
                          {"moments", set_json(g.moments)}});
    }
    return {{"builder", "lifted"},
            {"factor_dim", a.factor_dim},
            {"supports", supports},
            {"groups", groups},
            {"weights", set_json(a.weights)}};
}

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        out.push_back(row);
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DrMdpModel parse_model(const std::string& text) {
    const Locator loc(text);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        const auto colon = msg.find(": ", msg.find("parse error"));
        if (colon != std::string::npos) msg = msg.substr(colon + 2);
        const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        fail(ErrorKind::Parse, loc.at_offset(off) + ": " + msg);
    }
    return parse_document(doc, loc);
}

DrMdpModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Parse, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

std::string serialize_model(const DrMdpModel& m) {
    json states = json::array();
    for (int s = 0; s < m.num_states(); ++s) {
        const auto& st = m.states[s];
        json j = {{"name", st.name}};
        if (m.horizon == Horizon::Finite) {
            j["stage"] = st.stage;
            if (m.terminal[s] != 0.0) j["terminal"] = m.terminal[s];
        }
        if (!st.terminal()) {
            j["actions"] = st.actions;
            json succ = json::array();
            for (int nx : st.successors) succ.push_back(m.states[nx].name);
            j["successors"] = succ;
            j["factor_map"] = {{"dim", st.factors.factor_dim()},
                               {"P", matrix_json(st.factors.P)},
                               {"p0", vector_json(st.factors.p0)},
                               {"R", matrix_json(st.factors.R)},
                               {"r0", vector_json(st.factors.r0)}};
            j["ambiguity"] = ambiguity_json(st.ambiguity);
        }
        states.push_back(j);
    }
    json hz = m.horizon == Horizon::Finite ? json{{"type", "finite"}, {"stages", m.stages}}
                                           : json{{"type", "infinite"}, {"discount", m.discount}};
    json doc = {{"format", "drmdp-model"},
                {"version", 1},
                {"horizon", hz},
                {"initial", m.states.at(m.initial).name},
                {"states", states}};
    return doc.dump(1) + "\n";
}

SolveSummary summarize(const DrMdpModel& model, const dp::DpSolution& sol, bool slater_surrogates_passed) {
    SolveSummary s;
    s.horizon = model.horizon == Horizon::Finite ? "finite" : "infinite";
    s.initial_state = model.states.at(model.initial).name;
    s.value = sol.value.at(model.initial);
    s.saddle_residual = sol.max_saddle_residual();
    s.iterations = model.horizon == Horizon::Finite ? model.stages - 1 : sol.iterations;
    s.stationarity_residual = sol.stationarity_residual;
    s.bellman_residual = sol.bellman_residual;
    s.slater_surrogates_passed = slater_surrogates_passed;
    return s;
}

std::string summary_json(const SolveSummary& s) {
    std::ostringstream os;
    os << "{\n"
       << "  \"horizon\": \"" << s.horizon << "\",\n"
       << "  \"initial_state\": " << json(s.initial_state).dump() << ",\n"
       << "  \"value\": " << num(s.value) << ",\n"
       << "  \"saddle_residual\": " << num(s.saddle_residual) << ",\n"
       << "  \"iterations\": " << s.iterations << ",\n";
    if (s.horizon == "infinite")
        os << "  \"stationarity_residual\": " << num(s.stationarity_residual) << ",\n"
           << "  \"bellman_residual\": " << num(s.bellman_residual) << ",\n";
    os << "  \"duality_gap_verified\": " << (s.slater_surrogates_passed ? "true" : "false") << "\n"
       << "}\n";
    return os.str();
}

void write_solution(const std::string& dir, const DrMdpModel& model, const dp::DpSolution& sol,
                    const SolveSummary& summary) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) fail(ErrorKind::Structural, "cannot write " + (fs::path(dir) / name).string());
        return os;
    };
    {
        auto os = open("values.csv");
        os << "state,stage,value\n";
        for (int s = 0; s < model.num_states(); ++s)
            os << model.states[s].name << ',' << model.states[s].stage << ',' << num(sol.value[s]) << '\n';
    }
    {
        auto os = open("policy.csv");
        os << "state,action,probability\n";
        for (int s = 0; s < model.num_states(); ++s) {
            const auto& st = model.states[s];
            for (std::size_t a = 0; a < sol.policy[s].size(); ++a)
                os << st.name << ',' << st.actions[a] << ',' << num(sol.policy[s][a]) << '\n';
        }
    }
    {
        auto os = open("summary.json");
        os << summary_json(summary);
    }
}

} // namespace drmdp::io

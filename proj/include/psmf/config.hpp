#ifndef PSMF_CONFIG_HPP
#define PSMF_CONFIG_HPP

#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psmf/exact_matrix.hpp"
#include "psmf/quaternion.hpp"

namespace psmf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// tiny arithmetic expressions: numbers, + - * /, parentheses, sqrt(...),
// and the symbols i, pi, alpha, beta.  One grammar, three evaluation
// domains (complex floats, quadratic field elements, quaternions).

namespace expr {

struct Node {
    enum class Kind { number, symbol, negate, add, sub, mul, div, sqrt } kind;
    std::string text; // number literal or symbol name
    std::unique_ptr<Node> lhs, rhs;
};

using NodePtr = std::unique_ptr<Node>;

class Parser {
  public:
    explicit Parser(std::string src) : src_(std::move(src)) {}

    NodePtr parse() {
        auto n = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            fail("trailing input");
        return n;
    }

  private:
    std::string src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression '" + src_ + "': " + what + " at offset " +
                          std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr make(Node::Kind k, std::string text = {}, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        n->text = std::move(text);
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        while (true) {
            if (eat('+'))
                lhs = make(Node::Kind::add, {}, std::move(lhs), parse_product());
            else if (eat('-'))
                lhs = make(Node::Kind::sub, {}, std::move(lhs), parse_product());
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        while (true) {
            if (eat('*'))
                lhs = make(Node::Kind::mul, {}, std::move(lhs), parse_unary());
            else if (eat('/'))
                lhs = make(Node::Kind::div, {}, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-'))
            return make(Node::Kind::negate, {}, parse_unary());
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (eat('(')) {
            auto inner = parse_sum();
            if (!eat(')'))
                fail("missing ')'");
            return inner;
        }
        if (pos_ >= src_.size())
            fail("unexpected end");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            bool saw_exp = false;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d)) || d == '.') {
                    ++pos_;
                } else if ((d == 'e' || d == 'E') && !saw_exp) {
                    saw_exp = true;
                    ++pos_;
                    if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                        ++pos_;
                } else {
                    break;
                }
            }
            return make(Node::Kind::number, src_.substr(start, pos_ - start));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   std::isalnum(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            std::string name = src_.substr(start, pos_ - start);
            if (name == "sqrt") {
                if (!eat('('))
                    fail("sqrt needs '('");
                auto arg = parse_sum();
                if (!eat(')'))
                    fail("missing ')'");
                return make(Node::Kind::sqrt, {}, std::move(arg));
            }
            return make(Node::Kind::symbol, name);
        }
        fail("unexpected character");
    }
};

inline NodePtr parse(const std::string& s) { return Parser(s).parse(); }

// evaluation into complex numbers at working precision
template <class R>
complex_of<R> eval_complex(const Node& n) {
    using Cx = complex_of<R>;
    using std::sqrt;
    switch (n.kind) {
    case Node::Kind::number:
        return Cx(parse_real<R>(n.text), R(0));
    case Node::Kind::symbol:
        if (n.text == "i")
            return Cx(R(0), R(1));
        if (n.text == "pi")
            return Cx(pi<R>(), R(0));
        throw ConfigError("unknown symbol '" + n.text + "' in a numeric expression");
    case Node::Kind::negate:
        return -eval_complex<R>(*n.lhs);
    case Node::Kind::add:
        return eval_complex<R>(*n.lhs) + eval_complex<R>(*n.rhs);
    case Node::Kind::sub:
        return eval_complex<R>(*n.lhs) - eval_complex<R>(*n.rhs);
    case Node::Kind::mul:
        return eval_complex<R>(*n.lhs) * eval_complex<R>(*n.rhs);
    case Node::Kind::div: {
        Cx d = eval_complex<R>(*n.rhs);
        if (sqabs<R>(d) == 0)
            throw ConfigError("division by zero");
        return eval_complex<R>(*n.lhs) / d;
    }
    case Node::Kind::sqrt:
        return sqrt(eval_complex<R>(*n.lhs));
    }
    throw ConfigError("broken expression tree");
}

inline Rational parse_rational_literal(const std::string& text) {
    if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
        text.find('E') != std::string::npos)
        throw ConfigError("'" + text + "': exact context needs integer or fractional literals");
    return Rational(BigInt(text));
}

// evaluation into Q(sqrt d); sqrt arguments must be positive integers
inline QuadExt eval_quadext(const Node& n) {
    switch (n.kind) {
    case Node::Kind::number:
        return QuadExt(parse_rational_literal(n.text));
    case Node::Kind::symbol:
        throw ConfigError("symbol '" + n.text + "' is not valid in an exact matrix entry");
    case Node::Kind::negate:
        return -eval_quadext(*n.lhs);
    case Node::Kind::add:
        return eval_quadext(*n.lhs) + eval_quadext(*n.rhs);
    case Node::Kind::sub:
        return eval_quadext(*n.lhs) - eval_quadext(*n.rhs);
    case Node::Kind::mul:
        return eval_quadext(*n.lhs) * eval_quadext(*n.rhs);
    case Node::Kind::div:
        return eval_quadext(*n.lhs) / eval_quadext(*n.rhs);
    case Node::Kind::sqrt: {
        QuadExt arg = eval_quadext(*n.lhs);
        if (!arg.is_rational() || arg.x <= 0)
            throw ConfigError("sqrt in an exact entry needs a positive rational argument");
        // sqrt(p/q) = (m / q) sqrt(d) with p q = d m^2
        BigInt nd = numerator(arg.x) * denominator(arg.x);
        BigInt m = 1, rest = nd;
        for (BigInt p = 2; p * p <= rest;) {
            if (rest % (p * p) == 0) {
                m *= p;
                rest /= p * p;
            } else {
                ++p;
            }
        }
        return QuadExt(Rational(0), Rational(m, denominator(arg.x)),
                       rest.convert_to<long long>());
    }
    }
    throw ConfigError("broken expression tree");
}

// evaluation into the quaternion algebra span of {1, alpha, beta, alpha beta}
inline QuaternionElement eval_quaternion(const Node& n, const QuaternionAlgebraQ& alg) {
    switch (n.kind) {
    case Node::Kind::number:
        return QuaternionElement(parse_rational_literal(n.text), 0, 0, 0);
    case Node::Kind::symbol:
        if (n.text == "alpha")
            return QuaternionElement::alpha();
        if (n.text == "beta")
            return QuaternionElement::beta();
        throw ConfigError("symbol '" + n.text + "' is not valid in an order basis");
    case Node::Kind::negate:
        return -eval_quaternion(*n.lhs, alg);
    case Node::Kind::add:
        return eval_quaternion(*n.lhs, alg) + eval_quaternion(*n.rhs, alg);
    case Node::Kind::sub:
        return eval_quaternion(*n.lhs, alg) - eval_quaternion(*n.rhs, alg);
    case Node::Kind::mul:
        return multiply(eval_quaternion(*n.lhs, alg), eval_quaternion(*n.rhs, alg), alg);
    case Node::Kind::div: {
        QuaternionElement d = eval_quaternion(*n.rhs, alg);
        if (d.u != 0 || d.v != 0 || d.s != 0 || d.t == 0)
            throw ConfigError("an order basis entry may only be divided by a nonzero rational");
        Rational inv = Rational(denominator(d.t), numerator(d.t));
        return eval_quaternion(*n.lhs, alg).scaled(inv);
    }
    case Node::Kind::sqrt:
        throw ConfigError("sqrt is not valid in an order basis");
    }
    throw ConfigError("broken expression tree");
}

} // namespace expr

// ---------------------------------------------------------------------------

enum class QuadratureKind { riemann, simpson };
enum class SolverKind { svd, lu, both };

struct HeckeOperatorSpec {
    std::string label;                              // reporting key
    std::vector<std::array<std::string, 4>> cosets; // exact entry expressions
    std::string eigenvalue;                         // complex expression
    bool classical = false;                         // built-in coset construction
    long long prime = 0;                            // classical prime
};

struct RunConfig {
    enum class GroupKind { quaternion, generators } group = GroupKind::generators;

    // quaternion route
    std::string quaternion_a = "0", quaternion_b = "0";
    std::array<std::string, 4> order_basis{};
    int unit_height = 3;

    // explicit generator route: matrices of exact entry expressions
    std::vector<std::array<std::string, 4>> generators;
    int embedding_sign = +1;

    std::string center;
    int weight = 0;
    int digits = 15;
    std::optional<int> N;          // empty = auto from epsilon
    std::optional<std::string> epsilon;
    std::optional<int> Q;
    std::optional<std::string> radius;
    QuadratureKind quadrature = QuadratureKind::simpson;

    int search_height = 6;
    std::optional<std::string> cap;
    bool cocompact = true;
    std::optional<std::string> rho_override;
    std::optional<std::pair<int, std::vector<int>>> signature;

    std::optional<int> expected_dim;
    std::optional<bool> unit_automorphy; // empty = auto
    SolverKind solver = SolverKind::svd;
    std::uint64_t seed = 0;
    int verify_points = 32;
    std::optional<std::string> automorphy_tol;
    std::optional<std::string> hecke_tol;

    std::vector<HeckeOperatorSpec> hecke;

    bool normalize = false;
    std::optional<std::pair<int, int>> theta_cs; // (discriminant, class number)
    std::optional<std::string> theta;            // explicit complex override
    std::vector<std::pair<int, int>> period_pairs;

    // oracle mode (oracle-qexp subcommand)
    std::string oracle;   // "eta11" or empty
    int oracle_terms = 2000;
    int oracle_n = 8;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline int parse_int(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size())
            throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
    }
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "on" || s == "1")
        return true;
    if (s == "false" || s == "off" || s == "0")
        return false;
    throw ConfigError("key '" + key + "': '" + s + "' is not a boolean");
}

// matrix literal: [a, b; c, d] with expression entries
inline std::array<std::string, 4> parse_matrix_literal(const std::string& s) {
    std::string t = trim(s);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ConfigError("matrix literal must look like [a, b; c, d], got '" + s + "'");
    auto rows = split(t.substr(1, t.size() - 2), ';');
    if (rows.size() != 2)
        throw ConfigError("matrix literal needs exactly two rows: '" + s + "'");
    auto top = split(rows[0], ','), bottom = split(rows[1], ',');
    if (top.size() != 2 || bottom.size() != 2)
        throw ConfigError("matrix literal needs two entries per row: '" + s + "'");
    return {top[0], top[1], bottom[0], bottom[1]};
}

// split "[..] [..] [..]" on whitespace outside brackets
inline std::vector<std::string> split_matrices(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '[')
            ++depth;
        if (c == ']')
            --depth;
        if (depth == 0 && (c == ' ' || c == '\t') && !cur.empty() && cur.back() == ']') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty())
        out.push_back(trim(cur));
    return out;
}

} // namespace detail

// Hecke coset file: operators separated by blank lines; within an operator,
// one coset matrix per line as four exact entries plus the (repeated)
// eigenvalue.
inline std::vector<HeckeOperatorSpec> parse_hecke_file(std::istream& in,
                                                       const std::string& name) {
    std::vector<HeckeOperatorSpec> out;
    HeckeOperatorSpec cur;
    int lineno = 0;
    auto flush = [&]() {
        if (!cur.cosets.empty()) {
            cur.label = "file:" + std::to_string(out.size() + 1) + ":q" +
                        std::to_string(cur.cosets.size());
            out.push_back(cur);
        }
        cur = HeckeOperatorSpec{};
    };
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') {
            flush();
            continue;
        }
        std::istringstream fields(t);
        std::vector<std::string> tok;
        std::string f;
        while (fields >> f)
            tok.push_back(f);
        if (tok.size() != 5)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'a b c d a_p' (5 fields), got " +
                              std::to_string(tok.size()));
        if (!cur.cosets.empty() && tok[4] != cur.eigenvalue)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": eigenvalue changed inside an operator block");
        cur.eigenvalue = tok[4];
        cur.cosets.push_back({tok[0], tok[1], tok[2], tok[3]});
    }
    flush();
    if (out.empty())
        throw ConfigError(name + ": no operators found");
    return out;
}

inline RunConfig parse_config_stream(std::istream& in, const std::string& name,
                                     const std::string& include_dir) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    int lineno = 0;
    std::string line;
    bool group_set = false, center_set = false, weight_set = false;

    auto bad = [&](const std::string& msg) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (t.rfind("include ", 0) == 0) {
            std::string path = detail::trim(t.substr(8));
            std::string full = include_dir.empty() ? path : include_dir + "/" + path;
            std::ifstream f(full);
            if (!f)
                bad("cannot open include file '" + full + "'");
            auto ops = parse_hecke_file(f, path);
            cfg.hecke.insert(cfg.hecke.end(), ops.begin(), ops.end());
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            bad("expected 'key = value'");
        std::string key = detail::trim(t.substr(0, eq));
        std::string val = detail::trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            bad("empty key or value");
        if (seen.count(key))
            bad("duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "group") {
            group_set = true;
            if (val == "quaternion")
                cfg.group = RunConfig::GroupKind::quaternion;
            else if (val == "generators")
                cfg.group = RunConfig::GroupKind::generators;
            else
                bad("group must be 'quaternion' or 'generators'");
        } else if (key == "quaternion_a") {
            cfg.quaternion_a = val;
        } else if (key == "quaternion_b") {
            cfg.quaternion_b = val;
        } else if (key == "order_basis") {
            auto parts = detail::split(val, ';');
            if (parts.size() != 4)
                bad("order_basis needs 4 ';'-separated entries");
            for (int i = 0; i < 4; ++i)
                cfg.order_basis[std::size_t(i)] = parts[std::size_t(i)];
        } else if (key == "unit_height") {
            cfg.unit_height = detail::parse_int(val, key);
        } else if (key == "generators") {
            for (const auto& m : detail::split_matrices(val))
                cfg.generators.push_back(detail::parse_matrix_literal(m));
        } else if (key == "embedding_sign") {
            cfg.embedding_sign = detail::parse_int(val, key);
        } else if (key == "center") {
            center_set = true;
            cfg.center = val;
        } else if (key == "weight") {
            weight_set = true;
            cfg.weight = detail::parse_int(val, key);
        } else if (key == "digits") {
            cfg.digits = detail::parse_int(val, key);
        } else if (key == "n") {
            if (val != "auto")
                cfg.N = detail::parse_int(val, key);
        } else if (key == "epsilon") {
            cfg.epsilon = val;
        } else if (key == "q") {
            cfg.Q = detail::parse_int(val, key);
        } else if (key == "radius") {
            cfg.radius = val;
        } else if (key == "quadrature") {
            if (val == "riemann")
                cfg.quadrature = QuadratureKind::riemann;
            else if (val == "simpson")
                cfg.quadrature = QuadratureKind::simpson;
            else
                bad("quadrature must be riemann or simpson");
        } else if (key == "search_height") {
            cfg.search_height = detail::parse_int(val, key);
        } else if (key == "cap") {
            cfg.cap = val;
        } else if (key == "cocompact") {
            cfg.cocompact = detail::parse_bool(val, key);
        } else if (key == "rho") {
            cfg.rho_override = val;
        } else if (key == "signature") {
            auto parts = detail::split(val, ';');
            if (parts.size() != 2)
                bad("signature must look like 'genus;m1,m2,...' or 'genus;-'");
            std::vector<int> orders;
            if (parts[1] != "-")
                for (const auto& v : detail::split(parts[1], ','))
                    orders.push_back(detail::parse_int(v, key));
            cfg.signature = std::make_pair(detail::parse_int(parts[0], key), orders);
        } else if (key == "expected_dim") {
            cfg.expected_dim = detail::parse_int(val, key);
        } else if (key == "unit_automorphy") {
            if (val == "auto")
                cfg.unit_automorphy.reset();
            else
                cfg.unit_automorphy = detail::parse_bool(val, key);
        } else if (key == "solver") {
            if (val == "svd")
                cfg.solver = SolverKind::svd;
            else if (val == "lu")
                cfg.solver = SolverKind::lu;
            else if (val == "both")
                cfg.solver = SolverKind::both;
            else
                bad("solver must be svd, lu or both");
        } else if (key == "seed") {
            cfg.seed = std::stoull(val);
        } else if (key == "verify_points") {
            cfg.verify_points = detail::parse_int(val, key);
        } else if (key == "automorphy_tol") {
            cfg.automorphy_tol = val;
        } else if (key == "hecke_tol") {
            cfg.hecke_tol = val;
        } else if (key == "hecke_classical") {
            for (const auto& pair : detail::split(val, ',')) {
                auto pv = detail::split(pair, ':');
                if (pv.size() != 2)
                    bad("hecke_classical entries look like 'p:a_p'");
                HeckeOperatorSpec spec;
                spec.classical = true;
                spec.prime = detail::parse_int(pv[0], key);
                spec.eigenvalue = pv[1];
                spec.label = pv[0];
                cfg.hecke.push_back(spec);
            }
        } else if (key == "normalize_cm") {
            cfg.normalize = detail::parse_bool(val, key);
        } else if (key == "theta_cs") {
            auto parts = detail::split(val, ',');
            if (parts.size() != 2)
                bad("theta_cs must be 'discriminant, class_number'");
            cfg.theta_cs = std::make_pair(detail::parse_int(parts[0], key),
                                          detail::parse_int(parts[1], key));
        } else if (key == "theta") {
            cfg.theta = val;
        } else if (key == "period_pairs") {
            for (const auto& pair : detail::split(val, ',')) {
                auto pv = detail::split(pair, ':');
                if (pv.size() != 2)
                    bad("period_pairs entries look like 'from:to'");
                cfg.period_pairs.emplace_back(detail::parse_int(pv[0], key),
                                              detail::parse_int(pv[1], key));
            }
        } else if (key == "oracle") {
            cfg.oracle = val;
        } else if (key == "oracle_terms") {
            cfg.oracle_terms = detail::parse_int(val, key);
        } else if (key == "oracle_n") {
            cfg.oracle_n = detail::parse_int(val, key);
        } else {
            bad("unknown key '" + key + "'");
        }
    }

    if (!cfg.oracle.empty()) {
        if (!center_set)
            throw ConfigError(name + ": oracle runs still need a center");
        return cfg;
    }
    if (!group_set)
        throw ConfigError(name + ": missing 'group'");
    if (!center_set)
        throw ConfigError(name + ": missing 'center'");
    if (!weight_set)
        throw ConfigError(name + ": missing 'weight'");
    if (cfg.group == RunConfig::GroupKind::generators && cfg.generators.empty())
        throw ConfigError(name + ": group = generators needs a 'generators' key");
    if (cfg.group == RunConfig::GroupKind::quaternion)
        for (const auto& b : cfg.order_basis)
            if (b.empty())
                throw ConfigError(name + ": group = quaternion needs a 4-entry 'order_basis'");
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::string dir;
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos)
        dir = path.substr(0, slash);
    return parse_config_stream(in, path, dir);
}

} // namespace psmf

#endif

#include "cmot/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace cmot {

ParseError::ParseError(const std::string& origin, int line, int column, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

// Text with the original (line, column) of every character.
struct Located {
    std::string text;
    std::vector<std::pair<int, int>> pos;
    const std::string* origin = nullptr;

    [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
        std::pair<int, int> lc{1, 1};
        if (!pos.empty()) lc = pos[std::min(at, pos.size() - 1)];
        if (at >= pos.size() && !pos.empty()) lc.second += 1;
        throw ParseError(*origin, lc.first, lc.second, msg);
    }
};

Located trimmed(const Located& in, std::size_t b, std::size_t e) {
    while (b < e && std::isspace(static_cast<unsigned char>(in.text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(in.text[e - 1]))) --e;
    Located out;
    out.origin = in.origin;
    out.text = in.text.substr(b, e - b);
    out.pos.assign(in.pos.begin() + b, in.pos.begin() + e);
    return out;
}

std::optional<double> to_number(std::string_view s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (b != e && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e) return std::nullopt;
    return v;
}

// ---- field expressions ----

struct ArgValue {
    std::vector<double> numbers;
    bool is_array = false;
    std::size_t at = 0;
};

struct Call {
    std::string name;
    std::map<std::string, ArgValue> args;
    std::size_t at = 0;
    double sign = 1.0;
    std::optional<double> literal;
};

class ExprParser {
public:
    explicit ExprParser(const Located& src) : s_(src) {}

    std::vector<Call> parse() {
        std::vector<Call> terms;
        skip();
        double sign = 1.0;
        if (peek() == '-') {
            sign = -1.0;
            ++i_;
            skip();
        }
        terms.push_back(term(sign));
        skip();
        while (i_ < s_.text.size()) {
            char c = s_.text[i_];
            if (c != '+' && c != '-') s_.fail(i_, std::string("expected '+' or '-' but found '") + c + "'");
            ++i_;
            skip();
            terms.push_back(term(c == '-' ? -1.0 : 1.0));
            skip();
        }
        return terms;
    }

private:
    char peek() const { return i_ < s_.text.size() ? s_.text[i_] : '\0'; }
    void skip() {
        while (i_ < s_.text.size() && std::isspace(static_cast<unsigned char>(s_.text[i_]))) ++i_;
    }
    void expect(char c) {
        skip();
        if (peek() != c) s_.fail(i_, std::string("expected '") + c + "'");
        ++i_;
    }

    std::string ident() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.text.size() && (std::isalnum(static_cast<unsigned char>(s_.text[i_])) || s_.text[i_] == '_')) ++i_;
        if (b == i_) s_.fail(b, "expected a name");
        return s_.text.substr(b, i_ - b);
    }

    double number() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.text.size()) {
            char c = s_.text[i_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '-' ||
                c == '+') {
                if ((c == '-' || c == '+') && i_ > b && s_.text[i_ - 1] != 'e' && s_.text[i_ - 1] != 'E') break;
                ++i_;
            } else {
                break;
            }
        }
        auto v = to_number(std::string_view(s_.text).substr(b, i_ - b));
        if (!v) s_.fail(b, "expected a number");
        return *v;
    }

    ArgValue value() {
        skip();
        ArgValue v;
        v.at = i_;
        if (peek() == '[') {
            ++i_;
            v.is_array = true;
            skip();
            if (peek() == ']') {
                ++i_;
                return v;
            }
            for (;;) {
                v.numbers.push_back(number());
                skip();
                if (peek() == ',') {
                    ++i_;
                    continue;
                }
                if (peek() == ']') {
                    ++i_;
                    break;
                }
                s_.fail(i_, "expected ',' or ']' in array");
            }
        } else {
            v.numbers.push_back(number());
        }
        return v;
    }

    Call term(double sign) {
        skip();
        Call c;
        c.at = i_;
        c.sign = sign;
        char ch = peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            c.literal = number();
            return c;
        }
        c.name = ident();
        expect('(');
        skip();
        if (peek() == ')') {
            ++i_;
            return c;
        }
        for (;;) {
            skip();
            std::size_t key_at = i_;
            std::string key = ident();
            expect('=');
            if (c.args.count(key)) s_.fail(key_at, "argument '" + key + "' given twice");
            c.args[key] = value();
            skip();
            if (peek() == ',') {
                ++i_;
                continue;
            }
            if (peek() == ')') {
                ++i_;
                break;
            }
            s_.fail(i_, "expected ',' or ')' in argument list");
        }
        return c;
    }

    const Located& s_;
    std::size_t i_ = 0;
};

class Args {
public:
    Args(const Call& c, const Located& src) : c_(c), src_(src) {}

    double scalar(const std::string& key, std::optional<double> fallback = std::nullopt) {
        used_.insert(key);
        auto it = c_.args.find(key);
        if (it == c_.args.end()) {
            if (fallback) return *fallback;
            src_.fail(c_.at, c_.name + ": missing argument '" + key + "'");
        }
        if (it->second.is_array) src_.fail(it->second.at, c_.name + ": '" + key + "' must be a number");
        return it->second.numbers[0];
    }

    std::vector<double> array(const std::string& key, std::size_t expected) {
        used_.insert(key);
        auto it = c_.args.find(key);
        if (it == c_.args.end()) src_.fail(c_.at, c_.name + ": missing argument '" + key + "'");
        if (!it->second.is_array) src_.fail(it->second.at, c_.name + ": '" + key + "' must be an array");
        if (expected && it->second.numbers.size() != expected)
            src_.fail(it->second.at, c_.name + ": '" + key + "' must have " + std::to_string(expected) + " entries");
        return it->second.numbers;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        double v = scalar(key, fallback);
        if (!(v > 0.0)) src_.fail(where(key), c_.name + ": '" + key + "' must be positive");
        return v;
    }

    void finish() const {
        for (const auto& [k, v] : c_.args)
            if (!used_.count(k)) src_.fail(v.at, c_.name + ": unknown argument '" + k + "'");
    }

private:
    std::size_t where(const std::string& key) const {
        auto it = c_.args.find(key);
        return it == c_.args.end() ? c_.at : it->second.at;
    }

    const Call& c_;
    const Located& src_;
    std::set<std::string> used_;
};

struct Geometry {
    const GridSpec& g;

    double cx(int j) const { return (j + 0.5) * g.dx(); }
    double cy(int k) const { return (k + 0.5) * g.dy(); }

    // Distance from a cell centre to a point, minimum image when periodic.
    double dist(int j, int k, double px, double py) const {
        double ddx = cx(j) - px, ddy = cy(k) - py;
        if (g.space_bc == SpaceBc::Periodic) {
            ddx -= g.lx * std::round(ddx / g.lx);
            ddy -= g.ly * std::round(ddy / g.ly);
        }
        return std::hypot(ddx, ddy);
    }
};

void normalise_mass(SpaceField& f, double mass, const GridSpec& g, const Call& c, const Located& src) {
    const double total = space_integral(f, g);
    if (!(total > 0.0)) src.fail(c.at, c.name + ": profile has no support on the grid");
    for (double& v : f.values) v *= mass / total;
}

SpaceField evaluate_call(const Call& c, const GridSpec& g, const Located& src) {
    SpaceField f(g);
    if (c.literal) {
        std::fill(f.values.begin(), f.values.end(), *c.literal);
        return f;
    }
    Args a(c, src);
    Geometry geo{g};
    if (c.name == "constant") {
        std::fill(f.values.begin(), f.values.end(), a.scalar("value"));
    } else if (c.name == "gaussian") {
        auto ctr = a.array("center", 2);
        double sigma = a.positive("sigma");
        double mass = a.positive("mass", 1.0);
        const int images = g.space_bc == SpaceBc::Periodic ? 1 : 0;
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k) {
                double v = 0.0;
                for (int sx = -images; sx <= images; ++sx)
                    for (int sy = -images; sy <= images; ++sy) {
                        double ddx = geo.cx(j) - ctr[0] + sx * g.lx;
                        double ddy = geo.cy(k) - ctr[1] + sy * g.ly;
                        v += std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * sigma * sigma));
                    }
                f(j, k) = v;
            }
        normalise_mass(f, mass, g, c, src);
    } else if (c.name == "disk") {
        auto ctr = a.array("center", 2);
        double radius = a.positive("radius");
        double value = a.scalar("value", 1.0);
        double outside = a.scalar("outside", 0.0);
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k) f(j, k) = geo.dist(j, k, ctr[0], ctr[1]) <= radius ? value : outside;
    } else if (c.name == "annulus") {
        auto ctr = a.array("center", 2);
        double inner = a.scalar("inner");
        double outer = a.positive("outer");
        double value = a.scalar("value", 1.0);
        double outside = a.scalar("outside", 0.0);
        if (!(inner >= 0.0 && inner < outer)) src.fail(c.at, "annulus: requires 0 <= inner < outer");
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k) {
                double d = geo.dist(j, k, ctr[0], ctr[1]);
                f(j, k) = (d >= inner && d <= outer) ? value : outside;
            }
    } else if (c.name == "bump") {
        auto ctr = a.array("center", 2);
        double radius = a.positive("radius");
        double mass = a.positive("mass", 1.0);
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k) {
                double d = geo.dist(j, k, ctr[0], ctr[1]);
                double cval = d < radius ? std::cos(0.5 * std::numbers::pi * d / radius) : 0.0;
                f(j, k) = cval * cval;
            }
        normalise_mass(f, mass, g, c, src);
    } else if (c.name == "cone") {
        auto ctr = a.array("center", 2);
        double radius = a.positive("radius");
        double amp = a.scalar("amplitude", 1.0);
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k)
                f(j, k) = amp * std::max(0.0, 1.0 - geo.dist(j, k, ctr[0], ctr[1]) / radius);
    } else if (c.name == "array") {
        auto vals = a.array("values", 0);
        if (vals.size() != f.size())
            src.fail(c.at, "array: expected " + std::to_string(f.size()) + " values (nx*ny) but got " +
                               std::to_string(vals.size()));
        f.values = std::move(vals);
    } else {
        src.fail(c.at, "unknown field builder '" + c.name + "'");
    }
    a.finish();
    return f;
}

SpaceField evaluate_located(const Located& src, const GridSpec& g) {
    if (src.text.empty()) src.fail(0, "empty field expression");
    ExprParser parser(src);
    auto terms = parser.parse();
    SpaceField total(g);
    for (const auto& t : terms) {
        SpaceField f = evaluate_call(t, g, src);
        for (std::size_t n = 0; n < total.size(); ++n) total.values[n] += t.sign * f.values[n];
    }
    for (double v : total.values)
        if (!std::isfinite(v)) src.fail(0, "field expression produced a non-finite value");
    return total;
}

// ---- document structure ----

struct Entry {
    std::string key;
    Located value;
    std::size_t key_line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::vector<Section> split_sections(std::string_view text, const std::string& origin) {
    std::vector<Section> sections;
    Located pending;
    pending.origin = &origin;
    int depth = 0;
    int line_no = 0;
    std::size_t pos = 0;

    auto flush = [&](int line) {
        Located l = trimmed(pending, 0, pending.text.size());
        pending.text.clear();
        pending.pos.clear();
        if (l.text.empty()) return;
        if (l.text.front() == '[' && l.text.back() == ']' && l.text.find('=') == std::string::npos) {
            Located name = trimmed(l, 1, l.text.size() - 1);
            if (name.text.empty()) l.fail(0, "empty section name");
            sections.push_back({name.text, line, {}});
            return;
        }
        auto eq = l.text.find('=');
        if (eq == std::string::npos) l.fail(0, "expected 'key = value' or '[section]'");
        Located key = trimmed(l, 0, eq);
        Located val = trimmed(l, eq + 1, l.text.size());
        if (key.text.empty()) l.fail(0, "missing key before '='");
        for (char c : key.text)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') key.fail(0, "invalid key '" + key.text + "'");
        if (sections.empty()) key.fail(0, "key '" + key.text + "' appears before any section");
        if (val.text.empty()) l.fail(eq, "missing value for '" + key.text + "'");
        sections.back().entries.push_back({key.text, val, static_cast<std::size_t>(key.pos[0].first)});
    };

    int start_line = 1;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        if (pending.text.empty()) start_line = line_no;
        for (std::size_t c = 0; c < line.size(); ++c) {
            char ch = line[c];
            if (ch == '#' || ch == ';') break;
            if (ch == '\r') continue;
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            pending.text.push_back(ch);
            pending.pos.emplace_back(line_no, static_cast<int>(c + 1));
        }
        // Arrays may span lines: '[' opens a continuation only inside a value.
        int bracket = 0;
        for (std::size_t c = 0; c < pending.text.size(); ++c) {
            if (pending.text[c] == '[') ++bracket;
            if (pending.text[c] == ']') --bracket;
        }
        bool header = !pending.text.empty() && pending.text.find('=') == std::string::npos;
        if ((depth > 0 || (bracket > 0 && !header)) && end < text.size()) {
            pending.text.push_back(' ');
            pending.pos.emplace_back(line_no, static_cast<int>(line.size() + 1));
        } else {
            if (depth != 0 || bracket != 0) {
                Located l = pending;
                l.fail(l.text.empty() ? 0 : l.text.size() - 1, "unbalanced brackets");
            }
            flush(start_line);
            depth = 0;
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    return sections;
}

class SectionReader {
public:
    explicit SectionReader(const Section& s) : s_(s) {
        for (const auto& e : s.entries) {
            if (seen_.count(e.key)) e.value.fail(0, "duplicate key '" + e.key + "' in [" + s.name + "]");
            seen_[e.key] = &e;
        }
    }

    const Entry* find(const std::string& key) {
        used_.insert(key);
        auto it = seen_.find(key);
        return it == seen_.end() ? nullptr : it->second;
    }

    const Entry& require(const std::string& key, const Located& anchor_fallback) {
        const Entry* e = find(key);
        if (!e) anchor_fallback.fail(0, "[" + s_.name + "] is missing required key '" + key + "'");
        return *e;
    }

    std::optional<double> number(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        auto v = to_number(e->value.text);
        if (!v || !std::isfinite(*v)) e->value.fail(0, "'" + key + "' expects a number");
        return v;
    }

    std::optional<int> integer(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        int v = 0;
        const char* b = e->value.text.data();
        const char* end = b + e->value.text.size();
        auto [ptr, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || ptr != end) e->value.fail(0, "'" + key + "' expects an integer");
        return v;
    }

    std::optional<bool> boolean(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::string t = e->value.text;
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
        if (t == "false" || t == "no" || t == "off" || t == "0") return false;
        e->value.fail(0, "'" + key + "' expects true or false");
    }

    std::optional<std::string> string(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        return e->value.text;
    }

    void finish() const {
        for (const auto& e : s_.entries)
            if (!used_.count(e.key)) e.value.fail(0, "unknown key '" + e.key + "' in [" + s_.name + "]");
    }

    const Section& section() const { return s_; }

private:
    const Section& s_;
    std::map<std::string, const Entry*> seen_;
    std::set<std::string> used_;
};

Located section_anchor(const Section& s, const std::string& origin) {
    Located l;
    l.origin = &origin;
    l.text = s.name;
    l.pos.assign(s.name.size() + 1, {s.line, 1});
    return l;
}

}  // namespace

SpaceField evaluate_field(std::string_view expr, const GridSpec& grid) {
    static const std::string origin = "<expression>";
    Located src;
    src.origin = &origin;
    src.text = std::string(expr);
    for (std::size_t i = 0; i < expr.size(); ++i) src.pos.emplace_back(1, static_cast<int>(i + 1));
    return evaluate_located(trimmed(src, 0, src.text.size()), grid);
}

void validate_problem(TransportProblem& problem, bool rescale) {
    const GridSpec& g = problem.grid;
    auto check_density = [&](const SpaceField& f, const char* name) {
        if (!f.matches(g)) throw ValidationError(std::string(name) + " does not match the grid size");
        for (double v : f.values) {
            if (!std::isfinite(v)) throw ValidationError(std::string(name) + " has non-finite values");
            if (v < 0.0) throw ValidationError(std::string(name) + " must be nonnegative");
        }
    };
    check_density(problem.rho0, "rho0");
    check_density(problem.rho1, "rho1");
    const double m0 = space_integral(problem.rho0, g);
    const double m1 = space_integral(problem.rho1, g);
    if (!(m0 > 0.0) || !(m1 > 0.0)) throw ValidationError("rho0 and rho1 must have positive mass");
    const double mismatch = std::abs(m0 - m1) / std::max(m0, m1);
    if (mismatch > 1e-6) {
        if (!rescale) {
            std::ostringstream os;
            os.precision(12);
            os << "mass mismatch: rho0 has mass " << m0 << " but rho1 has mass " << m1
               << " (set rescale = true in [densities] to scale rho1)";
            throw ValidationError(os.str());
        }
        for (double& v : problem.rho1.values) v *= m0 / m1;
    }
    try {
        problem.constraint.validate(g);
    } catch (const ConstraintError& e) {
        throw ValidationError(std::string("constraint: ") + e.what());
    }
    const double v0 = hard_violation(problem.rho0, problem.constraint);
    const double v1 = hard_violation(problem.rho1, problem.constraint);
    if (v0 > 1e-9 || v1 > 1e-9) {
        std::ostringstream os;
        os << "endpoint densities violate a hard constraint (rho0 by " << v0 << ", rho1 by " << v1 << ")";
        throw ValidationError(os.str());
    }
}

ProblemFile parse_problem(std::string_view text, const std::string& origin) {
    auto sections = split_sections(text, origin);
    ProblemFile pf;

    const Section* grid_s = nullptr;
    const Section* dens_s = nullptr;
    const Section* solver_s = nullptr;
    const Section* output_s = nullptr;
    std::vector<const Section*> constraint_s;
    for (const auto& s : sections) {
        const Section** slot = nullptr;
        if (s.name == "grid") slot = &grid_s;
        else if (s.name == "densities") slot = &dens_s;
        else if (s.name == "solver") slot = &solver_s;
        else if (s.name == "output") slot = &output_s;
        else if (s.name == "constraint") {
            constraint_s.push_back(&s);
            continue;
        } else {
            throw ParseError(origin, s.line, 1, "unknown section [" + s.name + "]");
        }
        if (*slot) throw ParseError(origin, s.line, 1, "section [" + s.name + "] given twice");
        *slot = &s;
    }
    if (!grid_s) throw ParseError(origin, 1, 1, "missing [grid] section");
    if (!dens_s) throw ParseError(origin, 1, 1, "missing [densities] section");

    {
        SectionReader r(*grid_s);
        Located anchor = section_anchor(*grid_s, origin);
        auto nt = r.integer("nt");
        auto nx = r.integer("nx");
        auto ny = r.integer("ny");
        if (!nt || !nx || !ny) anchor.fail(0, "[grid] requires nt, nx and ny");
        SpaceBc bc = SpaceBc::Periodic;
        if (auto b = r.string("boundary")) {
            if (*b == "periodic") bc = SpaceBc::Periodic;
            else if (*b == "neumann") bc = SpaceBc::Neumann;
            else r.find("boundary")->value.fail(0, "boundary must be 'periodic' or 'neumann'");
        }
        double lx = r.number("lx").value_or(1.0);
        double ly = r.number("ly").value_or(1.0);
        r.finish();
        try {
            pf.problem.grid = GridSpec::make(*nt, *nx, *ny, bc, lx, ly);
        } catch (const GridError& e) {
            anchor.fail(0, e.what());
        }
    }
    const GridSpec& g = pf.problem.grid;

    bool rescale = false;
    {
        SectionReader r(*dens_s);
        Located anchor = section_anchor(*dens_s, origin);
        pf.problem.rho0 = evaluate_located(r.require("rho0", anchor).value, g);
        pf.problem.rho1 = evaluate_located(r.require("rho1", anchor).value, g);
        rescale = r.boolean("rescale").value_or(false);
        r.finish();
    }

    for (const Section* cs : constraint_s) {
        SectionReader r(*cs);
        Located anchor = section_anchor(*cs, origin);
        const Entry& type = r.require("type", anchor);
        const std::string& t = type.value.text;
        auto field = [&](const std::string& key) { return evaluate_located(r.require(key, anchor).value, g); };
        if (t == "none" || t == "unconstrained") {
            pf.problem.constraint.terms.push_back(Unconstrained{});
        } else if (t == "density_upper_bound") {
            SpaceField f = field("rho_bar");
            pf.auxiliary.emplace_back("rho_bar", f);
            pf.problem.constraint.terms.push_back(DensityUpperBound{std::move(f)});
        } else if (t == "density_lower_bound") {
            pf.problem.constraint.terms.push_back(DensityLowerBound{field("rho_min")});
        } else if (t == "momentum_penalty") {
            SpaceField f = field("psi");
            pf.auxiliary.emplace_back("psi", f);
            pf.problem.constraint.terms.push_back(MomentumQuadraticPenalty{std::move(f)});
        } else if (t == "fixed_density") {
            SpaceField m = field("mask");
            SpaceMask mask(g.nx, g.ny);
            for (std::size_t n = 0; n < m.size(); ++n) mask.inside[n] = m.values[n] > 0.0 ? 1 : 0;
            SpaceField value = field("value");
            pf.problem.constraint.terms.push_back(FixedDensityRegion{std::move(mask), std::move(value)});
        } else {
            type.value.fail(0, "unknown constraint type '" + t + "'");
        }
        r.finish();
    }

    if (solver_s) {
        SectionReader r(*solver_s);
        SolverParams& p = pf.params;
        if (auto a = r.string("algorithm")) {
            try {
                pf.algorithm = parse_algorithm(*a);
            } catch (const std::invalid_argument& e) {
                r.find("algorithm")->value.fail(0, e.what());
            }
        }
        p.r = r.number("r").value_or(p.r);
        p.s = r.number("s").value_or(p.s);
        p.rho = r.number("rho").value_or(p.rho);
        p.rho_nu = r.number("rho_nu").value_or(p.rho_nu);
        p.rho_eta = r.number("rho_eta").value_or(p.rho_eta);
        p.rho_r = r.number("rho_r").value_or(p.rho_r);
        p.rho_s = r.number("rho_s").value_or(p.rho_s);
        p.max_outer = r.integer("max_outer").value_or(p.max_outer);
        p.max_inner = r.integer("max_inner").value_or(p.max_inner);
        p.min_outer = r.integer("min_outer").value_or(p.min_outer);
        p.tol_density = r.number("tol_density").value_or(p.tol_density);
        p.inner_tol = r.number("inner_tol").value_or(p.inner_tol);
        r.finish();
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("[solver] ") + e.what());
        }
    }

    if (output_s) {
        SectionReader r(*output_s);
        OutputSpec& o = pf.outputs;
        o.dir = r.string("dir").value_or(o.dir);
        o.frames = r.boolean("frames").value_or(o.frames);
        o.images = r.boolean("images").value_or(o.images);
        o.history = r.boolean("history").value_or(o.history);
        o.snapshots = r.integer("snapshots").value_or(o.snapshots);
        r.finish();
        if (o.snapshots < 2) throw ValidationError("[output] snapshots must be >= 2");
    }

    validate_problem(pf.problem, rescale);
    return pf;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path.string());
}

}  // namespace cmot

/*
   Copyright 2026 The sfs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "sfs/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace sfs {
namespace {

struct Value {
    enum class Kind { number, string, boolean, complex, array };

    Kind kind = Kind::number;
    double num = 0.0;
    bool integral = false;
    bool negative = false;
    std::uint64_t magnitude = 0;
    std::string str;
    bool boolean = false;
    Complex cplx;
    std::vector<Value> items;
    int line = 0;
};

struct Entry {
    std::string key;
    Value value;
};

struct Section {
    std::vector<std::string> path;
    std::vector<Entry> entries;
    int line = 0;
};

class Parser {
  public:
    Parser(std::string_view text, std::string_view origin)
        : text_(text), origin_(origin)
    {
    }

    std::vector<Section> parse()
    {
        std::vector<Section> sections;
        sections.push_back({{}, {}, 0});
        while (!eof()) {
            skip_blank();
            if (eof()) break;
            char c = peek();
            if (c == '\n') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                advance();
                Section s;
                s.line = line_;
                s.path = parse_key_path(']');
                expect(']');
                end_of_line();
                sections.push_back(std::move(s));
                continue;
            }
            auto key_path = parse_key_path('=');
            if (key_path.size() != 1) fail("dotted keys are not supported");
            skip_blank();
            expect('=');
            skip_blank();
            Entry e;
            e.key = key_path.front();
            e.value = parse_value();
            for (const auto& prev : sections.back().entries) {
                if (prev.key == e.key) fail("duplicate key '" + e.key + "'");
            }
            sections.back().entries.push_back(std::move(e));
            end_of_line();
        }
        return sections;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(std::string(origin_) + ":" + std::to_string(line_)
                         + ": " + msg);
    }

  private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }
    void advance()
    {
        if (peek() == '\n') ++line_;
        ++pos_;
    }
    void skip_blank()
    {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) {
            advance();
        }
    }
    void skip_comment()
    {
        while (!eof() && peek() != '\n') advance();
    }
    void expect(char c)
    {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }
    void end_of_line()
    {
        skip_blank();
        if (peek() == '#') skip_comment();
        if (!eof() && peek() != '\n') fail("unexpected trailing characters");
    }

    std::string parse_quoted()
    {
        expect('"');
        std::string out;
        while (!eof() && peek() != '"') {
            if (peek() == '\n') fail("unterminated string");
            if (peek() == '\\') {
                advance();
                char c = peek();
                switch (c) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail("unsupported escape sequence");
                }
                advance();
                continue;
            }
            out += peek();
            advance();
        }
        expect('"');
        return out;
    }

    static bool bare_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::vector<std::string> parse_key_path(char terminator)
    {
        std::vector<std::string> path;
        while (true) {
            skip_blank();
            if (peek() == '"') {
                path.push_back(parse_quoted());
            } else {
                std::string k;
                while (!eof() && bare_char(peek())) {
                    k += peek();
                    advance();
                }
                if (k.empty()) fail("expected a key");
                path.push_back(std::move(k));
            }
            skip_blank();
            if (peek() == '.') {
                advance();
                continue;
            }
            if (peek() != terminator) {
                fail(std::string("expected '") + terminator + "'");
            }
            return path;
        }
    }

    Value parse_number()
    {
        size_t start = pos_;
        while (!eof()
               && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+'
                   || peek() == '-' || peek() == '.' || peek() == '_')) {
            advance();
        }
        std::string tok(text_.substr(start, pos_ - start));
        std::erase(tok, '_');
        Value v;
        v.kind = Value::Kind::number;
        v.line = line_;
        const char* b = tok.data();
        const char* e = tok.data() + tok.size();
        auto res = std::from_chars(b, e, v.num);
        if (res.ec != std::errc() || res.ptr != e) {
            fail("invalid number '" + tok + "'");
        }
        bool integral = tok.find_first_of(".eEinIN") == std::string::npos;
        if (integral) {
            v.integral = true;
            v.negative = !tok.empty() && tok[0] == '-';
            std::string digits = tok;
            if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
                digits.erase(0, 1);
            }
            auto r2 = std::from_chars(digits.data(), digits.data() + digits.size(),
                                      v.magnitude);
            if (r2.ec != std::errc()) fail("integer out of range '" + tok + "'");
        }
        return v;
    }

    double parse_real()
    {
        skip_blank();
        Value v = parse_number();
        return v.num;
    }

    Value parse_value()
    {
        skip_blank();
        Value v;
        v.line = line_;
        char c = peek();
        if (c == '"') {
            v.kind = Value::Kind::string;
            v.str = parse_quoted();
            return v;
        }
        if (c == '(') {
            advance();
            double re = parse_real();
            skip_blank();
            expect(',');
            double im = parse_real();
            skip_blank();
            expect(')');
            v.kind = Value::Kind::complex;
            v.cplx = {re, im};
            return v;
        }
        if (c == '[') {
            advance();
            v.kind = Value::Kind::array;
            while (true) {
                skip_ws_multiline();
                if (peek() == ']') {
                    advance();
                    return v;
                }
                v.items.push_back(parse_value());
                skip_ws_multiline();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                skip_ws_multiline();
                expect(']');
                return v;
            }
        }
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            v.kind = Value::Kind::boolean;
            v.boolean = true;
            return v;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            v.kind = Value::Kind::boolean;
            v.boolean = false;
            return v;
        }
        if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))
            || c == 'i' || c == 'n') {
            return parse_number();
        }
        fail("expected a value");
    }

    void skip_ws_multiline()
    {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                skip_comment();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::string_view origin_;
    size_t pos_ = 0;
    int line_ = 1;
};

//---------------------------------------------------------------------------//

class SectionReader {
  public:
    SectionReader(const Section& s, std::string name, std::string_view origin)
        : s_(s), name_(std::move(name)), origin_(origin)
    {
    }

    ~SectionReader() noexcept(false)
    {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& e : s_.entries) {
            if (!used_.count(e.key)) {
                fail(e.value.line, "unknown key '" + e.key + "' in [" + name_ + "]");
            }
        }
    }

    const Value* get(const std::string& key)
    {
        for (const auto& e : s_.entries) {
            if (e.key == key) {
                used_.insert(key);
                return &e.value;
            }
        }
        return nullptr;
    }

    double number(const std::string& key, double fallback)
    {
        const Value* v = get(key);
        if (!v) return fallback;
        if (v->kind != Value::Kind::number) fail(v->line, key + " must be a number");
        return v->num;
    }

    long long integer(const std::string& key, long long fallback)
    {
        const Value* v = get(key);
        if (!v) return fallback;
        if (v->kind != Value::Kind::number || !v->integral) {
            fail(v->line, key + " must be an integer");
        }
        auto mag = static_cast<long long>(v->magnitude);
        return v->negative ? -mag : mag;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        const Value* v = get(key);
        if (!v) return fallback;
        if (v->kind != Value::Kind::number || !v->integral || v->negative) {
            fail(v->line, key + " must be a non-negative integer");
        }
        return v->magnitude;
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        const Value* v = get(key);
        if (!v) return fallback;
        if (v->kind != Value::Kind::string) fail(v->line, key + " must be a string");
        return v->str;
    }

    [[noreturn]] void fail(int line, const std::string& msg) const
    {
        throw ParseError(std::string(origin_) + ":" + std::to_string(line) + ": "
                         + msg);
    }

    const Section& section() const { return s_; }
    void mark_all_used()
    {
        for (const auto& e : s_.entries) used_.insert(e.key);
    }

  private:
    const Section& s_;
    std::string name_;
    std::string_view origin_;
    std::set<std::string> used_;
};

Complex as_complex(const Value& v, SectionReader& r, const std::string& what)
{
    if (v.kind == Value::Kind::complex) return v.cplx;
    if (v.kind == Value::Kind::number) return {v.num, 0.0};
    r.fail(v.line, what + " must be a number or (re, im) pair");
}

RateProfile read_profile(SectionReader& r, const char* amplitude_key,
                         double amplitude_default)
{
    std::string shape = r.string("profile", "constant");
    RateProfile p;
    double amp = r.number(amplitude_key, amplitude_default);
    if (shape == "constant") {
        p = RateProfile::constant(amp);
    } else if (shape == "gaussian") {
        p = RateProfile::gaussian(amp, r.number("center", 0.0), r.number("width", 1.0));
    } else {
        const Value* v = r.get("profile");
        r.fail(v ? v->line : r.section().line, "unknown profile '" + shape + "'");
    }
    return p;
}

std::string join(const std::vector<std::string>& path)
{
    std::string out;
    for (size_t i = 0; i < path.size(); ++i) {
        if (i) out += '.';
        out += path[i];
    }
    return out;
}

std::pair<std::string, std::string> split_pair(const std::string& key, char sep,
                                               SectionReader& r, int line)
{
    auto pos = key.find(sep);
    if (pos == std::string::npos || pos == 0 || pos + 1 == key.size()) {
        r.fail(line, "key '" + key + "' must have the form a" + sep + "b");
    }
    return {key.substr(0, pos), key.substr(pos + 1)};
}

}  // namespace

//---------------------------------------------------------------------------//

Scenario parse_scenario(std::string_view text, std::string_view origin)
{
    Parser parser(text, origin);
    auto sections = parser.parse();

    Scenario s;
    s.system = {};
    if (!sections.front().entries.empty()) {
        throw ParseError(std::string(origin) + ":"
                         + std::to_string(sections.front().entries.front().value.line)
                         + ": key outside of any section");
    }

    // Levels first, so later sections may refer to labels.
    std::set<std::string> seen_tables;
    for (const auto& sec : sections) {
        if (sec.path.size() == 2 && sec.path[0] == "levels") {
            SectionReader r(sec, join(sec.path), origin);
            std::string m = r.string("manifold", "");
            Manifold man;
            if (m == "ground") {
                man = Manifold::ground;
            } else if (m == "excited") {
                man = Manifold::excited;
            } else if (m == "spectator") {
                man = Manifold::spectator;
            } else {
                r.fail(sec.line, "levels." + sec.path[1]
                                     + ".manifold must be ground, excited or spectator");
            }
            if (s.system.find(sec.path[1]) >= 0) {
                r.fail(sec.line, "duplicate level '" + sec.path[1] + "'");
            }
            s.system.add_level(sec.path[1], man, r.number("detuning", 0.0));
        }
    }
    const int m = s.system.size();
    s.initial = Eigen::MatrixXcd::Zero(m, m);

    for (const auto& sec : sections) {
        if (sec.path.empty()) continue;
        const std::string name = join(sec.path);
        const std::string& head = sec.path[0];
        if (head == "levels" && sec.path.size() == 2) continue;
        bool table = sec.path.size() == 1;
        if (table && !seen_tables.insert(head).second) {
            throw ParseError(std::string(origin) + ":" + std::to_string(sec.line)
                             + ": duplicate section [" + head + "]");
        }
        SectionReader r(sec, name, origin);
        if (head == "system" && table) {
            s.name = r.string("name", s.name);
            long long n = r.integer("n_atoms", 1);
            if (n > 1'000'000'000 || n < -1'000'000'000) {
                r.fail(sec.line, "n_atoms out of range");
            }
            s.n_atoms = static_cast<int>(n);
            s.gamma = r.number("gamma", 1.0);
        } else if (head == "dipoles" && table) {
            r.mark_all_used();
            for (const auto& e : sec.entries) {
                auto [up, lo] = split_pair(e.key, '-', r, e.value.line);
                int iu = s.system.index_of(up);
                int il = s.system.index_of(lo);
                AxisVector d{};
                if (e.value.kind == Value::Kind::array) {
                    if (e.value.items.empty() || e.value.items.size() > kAxes) {
                        r.fail(e.value.line, "dipole needs 1 or 2 components");
                    }
                    for (size_t a = 0; a < e.value.items.size(); ++a) {
                        d[a] = as_complex(e.value.items[a], r, "dipole component");
                    }
                } else {
                    d[0] = as_complex(e.value, r, "dipole");
                }
                s.system.set_dipole(iu, il, d);
            }
        } else if (head == "initial" && table) {
            r.mark_all_used();
            for (const auto& e : sec.entries) {
                auto [a, b] = split_pair(e.key, ',', r, e.value.line);
                int ia = s.system.index_of(a);
                int ib = s.system.index_of(b);
                s.initial(ia, ib) = as_complex(e.value, r, "initial entry");
            }
        } else if (head == "channels" && sec.path.size() == 2) {
            ChannelPreset c;
            c.name = sec.path[1];
            std::string kind = r.string("kind", "");
            if (kind == "pump" || kind == "decay") {
                c.kind = kind == "pump" ? ChannelKind::pump : ChannelKind::decay;
                c.from = s.system.index_of(r.string("from", ""));
                c.to = s.system.index_of(r.string("to", ""));
            } else if (kind == "dephase") {
                c.kind = ChannelKind::dephase;
                c.level = s.system.index_of(r.string("level", ""));
            } else if (kind == "rate") {
                c.kind = ChannelKind::generic;
                const Value* v = r.get("indices");
                if (!v || v->kind != Value::Kind::array || v->items.size() != 4) {
                    r.fail(sec.line, "rate channel needs indices = [p, q, r, s]");
                }
                for (int i = 0; i < 4; ++i) {
                    if (v->items[i].kind != Value::Kind::string) {
                        r.fail(v->line, "indices must be level labels");
                    }
                    c.indices[i] = s.system.index_of(v->items[i].str);
                }
            } else {
                r.fail(sec.line, "channel kind must be pump, decay, dephase or rate");
            }
            c.rate = read_profile(r, "rate", 0.0);
            s.channels.presets.push_back(c);
        } else if (head == "field" && table) {
            s.field.enabled = true;
            for (int a = 0; a < kAxes; ++a) {
                const char* key = a == 0 ? "x" : "y";
                if (const Value* v = r.get(key)) {
                    s.field.amplitude[a] = as_complex(*v, r, key);
                }
            }
            s.field.envelope = read_profile(r, "amplitude", 1.0);
        } else if (head == "grid" && table) {
            s.grid.t_start = r.number("t_start", 0.0);
            s.grid.t_end = r.number("t_end", 1.0);
            long long pts = r.integer("points", 101);
            if (pts > 100'000'000 || pts < 0) r.fail(sec.line, "points out of range");
            s.grid.points = static_cast<int>(pts);
            s.grid.step_cap = r.number("step_cap", 0.0);
            s.grid.rtol = r.number("rtol", 1e-8);
            s.grid.atol = r.number("atol", 1e-10);
        } else if (head == "ensemble" && table) {
            s.ensemble.trajectories = r.integer("trajectories", 1000);
            s.ensemble.seed = r.unsigned_integer("seed", 1);
            s.ensemble.divergence_threshold = r.number("divergence_threshold", 1e3);
            s.ensemble.max_omitted_fraction = r.number("max_omitted_fraction", 0.05);
        } else if (head == "gauge" && table) {
            std::string p = r.string("policy", "adaptive");
            auto gp = parse_gauge_policy(p);
            if (!gp) r.fail(sec.line, "gauge.policy must be adaptive, on or off");
            s.gauge_policy = *gp;
            std::string w = r.string("weight", "on");
            auto wm = parse_weight_mode(w);
            if (!wm) r.fail(sec.line, "gauge.weight must be on or off");
            s.weight_mode = *wm;
        } else if (head == "oracle" && table) {
            s.oracle.max_dimension = r.integer("max_dimension", 100);
        } else {
            r.mark_all_used();
            throw ParseError(std::string(origin) + ":" + std::to_string(sec.line)
                             + ": unknown section [" + name + "]");
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str(), path);
    require_valid(s);
    return s;
}

//---------------------------------------------------------------------------//

namespace {

std::string fmt_double(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    std::string out(buf, res.ptr);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

std::string fmt_complex(Complex c)
{
    return "(" + fmt_double(c.real()) + ", " + fmt_double(c.imag()) + ")";
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string section_key(const std::string& s)
{
    bool bare = !s.empty();
    for (char c : s) {
        bare = bare
               && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-');
    }
    return bare ? s : quote(s);
}

void write_profile(std::ostream& os, const RateProfile& p, const char* amplitude_key)
{
    os << "profile = " << quote(std::string(to_string(p.shape))) << "\n";
    os << amplitude_key << " = " << fmt_double(p.amplitude) << "\n";
    if (p.shape == RateProfile::Shape::gaussian) {
        os << "center = " << fmt_double(p.center) << "\n";
        os << "width = " << fmt_double(p.width) << "\n";
    }
}

}  // namespace

std::string save_text(const Scenario& s)
{
    std::ostringstream os;
    const auto& sys = s.system;
    os << "[system]\n";
    os << "name = " << quote(s.name) << "\n";
    os << "n_atoms = " << s.n_atoms << "\n";
    os << "gamma = " << fmt_double(s.gamma) << "\n";
    for (int i = 0; i < sys.size(); ++i) {
        os << "\n[levels." << section_key(sys.labels[i]) << "]\n";
        os << "manifold = " << quote(std::string(to_string(sys.manifold[i]))) << "\n";
        os << "detuning = " << fmt_double(sys.detuning[i]) << "\n";
    }
    if (!sys.dipoles.empty()) {
        os << "\n[dipoles]\n";
        for (const auto& d : sys.dipoles) {
            os << quote(sys.labels[d.upper] + "-" + sys.labels[d.lower]) << " = ["
               << fmt_complex(d.d[0]) << ", " << fmt_complex(d.d[1]) << "]\n";
        }
    }
    os << "\n[initial]\n";
    for (int p = 0; p < s.initial.rows(); ++p) {
        for (int q = 0; q < s.initial.cols(); ++q) {
            if (s.initial(p, q) == Complex{}) continue;
            os << quote(sys.labels[p] + "," + sys.labels[q]) << " = "
               << fmt_complex(s.initial(p, q)) << "\n";
        }
    }
    for (const auto& c : s.channels.presets) {
        os << "\n[channels." << section_key(c.name) << "]\n";
        os << "kind = " << quote(std::string(to_string(c.kind))) << "\n";
        switch (c.kind) {
        case ChannelKind::pump:
        case ChannelKind::decay:
            os << "from = " << quote(sys.labels[c.from]) << "\n";
            os << "to = " << quote(sys.labels[c.to]) << "\n";
            break;
        case ChannelKind::dephase:
            os << "level = " << quote(sys.labels[c.level]) << "\n";
            break;
        case ChannelKind::generic:
            os << "indices = [";
            for (int i = 0; i < 4; ++i) {
                os << (i ? ", " : "") << quote(sys.labels[c.indices[i]]);
            }
            os << "]\n";
            break;
        }
        write_profile(os, c.rate, "rate");
    }
    if (s.field.enabled) {
        os << "\n[field]\n";
        os << "x = " << fmt_complex(s.field.amplitude[0]) << "\n";
        os << "y = " << fmt_complex(s.field.amplitude[1]) << "\n";
        write_profile(os, s.field.envelope, "amplitude");
    }
    os << "\n[grid]\n";
    os << "t_start = " << fmt_double(s.grid.t_start) << "\n";
    os << "t_end = " << fmt_double(s.grid.t_end) << "\n";
    os << "points = " << s.grid.points << "\n";
    os << "step_cap = " << fmt_double(s.grid.step_cap) << "\n";
    os << "rtol = " << fmt_double(s.grid.rtol) << "\n";
    os << "atol = " << fmt_double(s.grid.atol) << "\n";
    os << "\n[ensemble]\n";
    os << "trajectories = " << s.ensemble.trajectories << "\n";
    os << "seed = " << s.ensemble.seed << "\n";
    os << "divergence_threshold = " << fmt_double(s.ensemble.divergence_threshold) << "\n";
    os << "max_omitted_fraction = " << fmt_double(s.ensemble.max_omitted_fraction)
       << "\n";
    os << "\n[gauge]\n";
    os << "policy = " << quote(std::string(to_string(s.gauge_policy))) << "\n";
    os << "weight = " << quote(std::string(to_string(s.weight_mode))) << "\n";
    os << "\n[oracle]\n";
    os << "max_dimension = " << s.oracle.max_dimension << "\n";
    return os.str();
}

void save_scenario(const Scenario& s, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot write file");
    out << save_text(s);
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::string config_hash(const Scenario& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : save_text(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sfs

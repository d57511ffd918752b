#include "nsc/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "nsc/error.hpp"
#include "nsc/random.hpp"

#ifndef NSC_VERSION_STRING
#define NSC_VERSION_STRING "0.0.0"
#endif

namespace nsc {

std::string_view version() noexcept
{
    return NSC_VERSION_STRING;
}

namespace {

std::string_view trim(std::string_view s) noexcept
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_cells(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) {
            return cells;
        }
        start = comma + 1;
    }
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what)
{
    throw Error(ErrorKind::parse, source + ":" + std::to_string(line) + ": " + what);
}

// "key = value" inside a comment line; nullopt when there is no '='.
std::optional<std::pair<std::string, std::string>> comment_pair(std::string_view line)
{
    line = trim(line.substr(1));
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        return std::nullopt;
    }
    return std::pair{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
}

template <class Int>
std::optional<Int> parse_int(std::string_view text) noexcept
{
    text = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

void append_meta(std::string& out, const Metadata& meta)
{
    out += "# nsc_version = ";
    out += version();
    out += '\n';
    for (const auto& [key, value] : meta) {
        out += "# " + key + " = " + value + '\n';
    }
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view text) noexcept
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

const std::vector<double>& Dataset::column(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return columns[i];
        }
    }
    std::string list;
    for (const auto& n : names) {
        list += (list.empty() ? "" : ", ") + n;
    }
    throw Error(ErrorKind::invalid_argument,
                "no column '" + std::string(name) + "'; available: " + list);
}

TimeSeries Dataset::series(std::string_view name) const
{
    return TimeSeries(column(name), tau0);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::io, "error while reading '" + path + "'");
    }
    return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw Error(ErrorKind::io, "error while writing '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw Error(ErrorKind::io, "cannot replace '" + path + "': " + ec.message());
    }
}

// --- CSV -------------------------------------------------------------------

Dataset parse_csv(std::string_view text, std::optional<double> tau0_override,
                  const std::string& source)
{
    Dataset data;
    std::optional<double> tau0;
    bool have_header = false;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        const std::string_view line = trim(lines[i]);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (auto kv = comment_pair(line)) {
                if (kv->first == "tau0") {
                    tau0 = parse_double(kv->second);
                    if (!tau0 || !(*tau0 > 0.0)) {
                        parse_fail(source, lineno, "tau0 must be a positive number");
                    }
                } else {
                    data.metadata.push_back(std::move(*kv));
                }
            }
            continue;
        }
        const auto cells = split_cells(line);
        if (!have_header) {
            std::set<std::string_view> seen;
            for (const auto cell : cells) {
                if (cell.empty()) {
                    parse_fail(source, lineno, "empty column name in header");
                }
                if (!seen.insert(cell).second) {
                    parse_fail(source, lineno, "duplicate column '" + std::string(cell) + "'");
                }
                data.names.emplace_back(cell);
            }
            data.columns.resize(data.names.size());
            have_header = true;
            continue;
        }
        if (cells.size() != data.names.size()) {
            parse_fail(source, lineno, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                           std::to_string(data.names.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = parse_double(cells[c]);
            if (!v) {
                parse_fail(source, lineno, "column '" + data.names[c] + "': '" + std::string(cells[c]) +
                                               "' is not a finite number");
            }
            data.columns[c].push_back(*v);
        }
    }
    if (!have_header) {
        throw Error(ErrorKind::parse, source + ": no header row");
    }
    if (tau0_override) {
        if (!(*tau0_override > 0.0) || !std::isfinite(*tau0_override)) {
            throw Error(ErrorKind::domain, "tau0 override must be positive");
        }
        tau0 = tau0_override;
    }
    if (!tau0) {
        throw Error(ErrorKind::parse, source + ": no '# tau0 = <seconds>' line and no override");
    }
    data.tau0 = *tau0;
    return data;
}

Dataset read_csv(const std::string& path, std::optional<double> tau0_override)
{
    return parse_csv(read_file(path), tau0_override, path);
}

void write_csv(const Dataset& data, const std::string& path, const Metadata& meta)
{
    if (data.names.empty() || data.names.size() != data.columns.size()) {
        throw Error(ErrorKind::shape, "dataset has no columns or mismatched names");
    }
    for (const auto& c : data.columns) {
        if (c.size() != data.rows()) {
            throw Error(ErrorKind::shape, "dataset columns differ in length");
        }
    }
    std::string out;
    append_meta(out, meta);
    out += "# tau0 = " + format_double(data.tau0) + '\n';
    for (std::size_t c = 0; c < data.names.size(); ++c) {
        out += (c ? "," : "") + data.names[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            if (c) {
                out += ',';
            }
            out += format_double(data.columns[c][r]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

// --- curves ----------------------------------------------------------------

std::string format_curve(const KCurve& curve, const Metadata& meta)
{
    curve.validate();
    std::string out;
    append_meta(out, meta);
    out += "# y = " + curve.y_name + '\n';
    out += "# x = " + curve.x_name + '\n';
    out += "# noise_kind = ";
    out += curve.noise_kind ? to_string(*curve.noise_kind) : std::string_view("none");
    out += '\n';
    out += "# k_m = " + format_double(curve.k_m) + '\n';
    out += "# tau0 = " + format_double(curve.tau0) + '\n';
    for (const auto& o : curve.omitted) {
        out += "# omitted = " + std::to_string(o.m) + ' ' + o.reason + '\n';
    }
    out += "m,tau,k,sigma_k,edf,style,variant\n";
    const std::string tail = "," + std::string(to_string(curve.style)) + "," +
                             std::string(to_string(curve.variant)) + '\n';
    for (const auto& p : curve.points) {
        out += std::to_string(p.m) + ',' + format_double(p.tau) + ',' + format_double(p.k) + ',' +
               format_double(p.sigma_k) + ',' + format_double(p.edf) + tail;
    }
    return out;
}

void write_curve(const KCurve& curve, const std::string& path, const Metadata& meta)
{
    write_file_atomic(path, format_curve(curve, meta));
}

KCurve parse_curve(std::string_view text, const std::string& source)
{
    KCurve curve;
    bool have_header = false;
    std::optional<Style> style;
    std::optional<Variant> variant;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        const std::string_view line = trim(lines[i]);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto kv = comment_pair(line);
            if (!kv) {
                continue;
            }
            const auto& [key, value] = *kv;
            if (key == "y") {
                curve.y_name = value;
            } else if (key == "x") {
                curve.x_name = value;
            } else if (key == "noise_kind") {
                if (value == "none") {
                    curve.noise_kind.reset();
                } else if (auto k = parse_noise_kind(value)) {
                    curve.noise_kind = k;
                } else {
                    parse_fail(source, lineno, "unknown noise kind '" + value + "'");
                }
            } else if (key == "k_m" || key == "tau0") {
                const auto v = parse_double(value);
                if (!v || !(*v > 0.0)) {
                    parse_fail(source, lineno, key + " must be a positive number");
                }
                (key == "k_m" ? curve.k_m : curve.tau0) = *v;
            } else if (key == "omitted") {
                const auto space = value.find(' ');
                const auto m = parse_int<std::size_t>(std::string_view(value).substr(0, space));
                if (!m || space == std::string::npos) {
                    parse_fail(source, lineno, "omitted point needs '<m> <reason>'");
                }
                curve.omitted.push_back({*m, std::string(trim(std::string_view(value).substr(space)))});
            }
            continue;
        }
        const auto cells = split_cells(line);
        if (!have_header) {
            const std::vector<std::string_view> expected{"m", "tau", "k", "sigma_k", "edf", "style", "variant"};
            if (cells != expected) {
                parse_fail(source, lineno, "expected header m,tau,k,sigma_k,edf,style,variant");
            }
            have_header = true;
            continue;
        }
        if (cells.size() != 7) {
            parse_fail(source, lineno, "curve row needs 7 cells, got " + std::to_string(cells.size()));
        }
        KCurvePoint p;
        const auto m = parse_int<std::size_t>(cells[0]);
        const auto tau = parse_double(cells[1]);
        const auto k = parse_double(cells[2]);
        const auto sk = parse_double(cells[3]);
        const auto edf = parse_double(cells[4]);
        if (!m || !tau || !k || !sk || !edf) {
            parse_fail(source, lineno, "malformed numeric cell in curve row");
        }
        const auto st = parse_style(cells[5]);
        const auto va = parse_variant(cells[6]);
        if (!st || !va) {
            parse_fail(source, lineno, "unknown style or variant");
        }
        if ((style && *style != *st) || (variant && *variant != *va)) {
            parse_fail(source, lineno, "style and variant must be the same on every row");
        }
        style = st;
        variant = va;
        curve.points.push_back({*m, *tau, *k, *sk, *edf});
    }
    if (!have_header) {
        throw Error(ErrorKind::parse, source + ": no curve header");
    }
    if (curve.points.empty()) {
        throw Error(ErrorKind::parse, source + ": curve has no points");
    }
    curve.style = *style;
    curve.variant = *variant;
    curve.validate();
    return curve;
}

KCurve read_curve(const std::string& path)
{
    return parse_curve(read_file(path), path);
}

// --- config files ------------------------------------------------------------

const IniEntry* IniSection::find(std::string_view key) const noexcept
{
    for (const auto& e : entries) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

std::vector<IniSection> parse_ini(std::string_view text, const std::string& source)
{
    std::vector<IniSection> sections;
    sections.push_back({"", {}, 0});
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        std::string_view line = lines[i];
        const auto comment = line.find_first_of("#;");
        if (comment != std::string_view::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                parse_fail(source, lineno, "unterminated section header");
            }
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) {
                parse_fail(source, lineno, "empty section name");
            }
            for (const auto& s : sections) {
                if (s.name == name) {
                    parse_fail(source, lineno, "duplicate section [" + name + "]");
                }
            }
            sections.push_back({name, {}, lineno});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            parse_fail(source, lineno, "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            parse_fail(source, lineno, "missing key");
        }
        auto& section = sections.back();
        if (section.find(key)) {
            parse_fail(source, lineno, "duplicate key '" + key + "'");
        }
        section.entries.push_back({key, std::string(trim(line.substr(eq + 1))), lineno});
    }
    if (sections.front().entries.empty()) {
        sections.erase(sections.begin());
    }
    return sections;
}

namespace {

double number(const IniSection& s, std::string_view key, const std::string& source)
{
    const IniEntry* e = s.find(key);
    if (!e) {
        parse_fail(source, s.line, "section [" + s.name + "] lacks '" + std::string(key) + "'");
    }
    const auto v = parse_double(e->value);
    if (!v) {
        parse_fail(source, e->line, "'" + e->key + "' is not a finite number");
    }
    return *v;
}

std::optional<double> optional_number(const IniSection& s, std::string_view key,
                                      const std::string& source)
{
    return s.find(key) ? std::optional(number(s, key, source)) : std::nullopt;
}

template <class Int>
Int integer(const IniSection& s, std::string_view key, Int fallback, const std::string& source)
{
    const IniEntry* e = s.find(key);
    if (!e) {
        return fallback;
    }
    const auto v = parse_int<Int>(e->value);
    if (!v) {
        parse_fail(source, e->line, "'" + e->key + "' is not an integer");
    }
    return *v;
}

void check_keys(const IniSection& s, const std::set<std::string_view>& allowed, const std::string& source)
{
    for (const auto& e : s.entries) {
        if (!allowed.count(e.key)) {
            parse_fail(source, e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
        }
    }
}

constexpr NoiseKind all_kinds[] = {NoiseKind::wfn, NoiseKind::ffn, NoiseKind::rwn};

std::vector<NoiseSpec> mixture(const IniSection& s, std::uint64_t master, std::uint64_t channel,
                               const std::string& source)
{
    std::vector<NoiseSpec> mix;
    for (std::size_t i = 0; i < 3; ++i) {
        const NoiseKind kind = all_kinds[i];
        if (const auto level = optional_number(s, to_string(kind), source)) {
            if (!(*level > 0.0)) {
                parse_fail(source, s.find(to_string(kind))->line, "noise level must be positive");
            }
            mix.push_back(NoiseSpec::make(kind, *level, derive_seed(master, channel + i)));
        }
    }
    return mix;
}

} // namespace

std::vector<BudgetEntry> parse_budget(std::string_view text, const std::string& source)
{
    std::vector<BudgetEntry> entries;
    for (const auto& s : parse_ini(text, source)) {
        if (s.name.empty()) {
            parse_fail(source, s.entries.front().line, "budget keys must sit inside a [section]");
        }
        check_keys(s, {"k", "sigma_x", "sigma_x_b"}, source);
        const double k = number(s, "k", source);
        const double sx = number(s, "sigma_x", source);
        const double sb = optional_number(s, "sigma_x_b", source).value_or(0.0);
        if (sx < 0.0 || sb < 0.0) {
            parse_fail(source, s.line, "uncertainties in [" + s.name + "] must be >= 0");
        }
        entries.push_back(BudgetEntry::with_type_b(s.name, k, sx, sb));
    }
    return entries;
}

std::vector<BudgetEntry> read_budget(const std::string& path)
{
    return parse_budget(read_file(path), path);
}

Scenario parse_scenario(std::string_view text, const std::string& source)
{
    const auto sections = parse_ini(text, source);
    Scenario sc;
    const IniSection* head = nullptr;
    for (const auto& s : sections) {
        if (s.name == "scenario") {
            head = &s;
        }
    }
    if (!head) {
        throw Error(ErrorKind::parse, source + ": missing [scenario] section");
    }
    check_keys(*head, {"name", "n", "tau0", "seed", "y_bar"}, source);
    if (const IniEntry* e = head->find("name")) {
        sc.name = e->value;
    }
    sc.n = integer<std::size_t>(*head, "n", 0, source);
    sc.seed = integer<std::uint64_t>(*head, "seed", 1, source);
    sc.tau0 = optional_number(*head, "tau0", source).value_or(1.0);
    sc.clock.y_bar = optional_number(*head, "y_bar", source).value_or(0.0);

    std::uint64_t effect_index = 0;
    for (const auto& s : sections) {
        if (s.name == "scenario") {
            continue;
        }
        if (s.name == "floor") {
            check_keys(s, {"wfn", "ffn", "rwn", "q", "snr"}, source);
            sc.clock.floor = mixture(s, sc.seed, 100, source);
            const auto q = optional_number(s, "q", source);
            const auto snr = optional_number(s, "snr", source);
            if (q.has_value() != snr.has_value()) {
                parse_fail(source, s.line, "[floor] needs both q and snr");
            }
            if (q) {
                sc.clock.quality = QualityFloor{*q, *snr, derive_seed(sc.seed, 0)};
            }
        } else if (s.name == "reference") {
            check_keys(s, {"wfn", "ffn", "rwn"}, source);
            sc.clock.reference = mixture(s, sc.seed, 200, source);
        } else if (s.name.rfind("effect.", 0) == 0 && s.name.size() > 7) {
            check_keys(s, {"k", "wfn", "ffn", "rwn", "delay", "integral", "measurement_wfn",
                           "operating_point"},
                       source);
            EffectSpec e;
            e.name = s.name.substr(7);
            e.k = number(s, "k", source);
            const std::uint64_t base = 1000 + 10 * effect_index++;
            e.niv = mixture(s, sc.seed, base, source);
            if (e.niv.empty()) {
                parse_fail(source, s.line, "[" + s.name + "] needs at least one of wfn, ffn, rwn");
            }
            const int delay = integer<int>(s, "delay", 0, source);
            const std::size_t integral = integer<std::size_t>(s, "integral", 1, source);
            if (delay != 0 || integral != 1) {
                e.asynchrony = AsynchronySpec{delay, integral};
            }
            if (const auto level = optional_number(s, "measurement_wfn", source)) {
                e.measurement_noise = NoiseSpec::make(NoiseKind::wfn, *level, derive_seed(sc.seed, base + 9));
            }
            e.operating_point = optional_number(s, "operating_point", source);
            sc.clock.effects.push_back(std::move(e));
        } else {
            parse_fail(source, s.line, "unknown section [" + s.name + "]");
        }
    }
    sc.validate();
    return sc;
}

Scenario read_scenario(const std::string& path)
{
    return parse_scenario(read_file(path), path);
}

std::string format_truth(const Truth& truth, const Metadata& meta)
{
    std::string out;
    append_meta(out, meta);
    out += "[scenario]\n";
    out += "name = " + truth.scenario + '\n';
    out += "seed = " + std::to_string(truth.seed) + '\n';
    out += "n = " + std::to_string(truth.n) + '\n';
    out += "tau0 = " + format_double(truth.tau0) + '\n';
    out += "y_bar = " + format_double(truth.y_bar) + '\n';
    if (!truth.caveat.empty()) {
        out += "caveat = " + truth.caveat + '\n';
    }
    for (const auto& e : truth.effects) {
        out += "\n[effect." + e.name + "]\n";
        out += "k = " + format_double(e.k) + '\n';
        out += "delay = " + std::to_string(e.delay_steps) + '\n';
        out += "integral = " + std::to_string(e.integral_steps) + '\n';
        out += std::string("quadratic = ") + (e.quadratic ? "true" : "false") + '\n';
        out += "ratio = " + format_double(e.ratio) + '\n';
    }
    return out;
}

void write_truth(const Truth& truth, const std::string& path, const Metadata& meta)
{
    write_file_atomic(path, format_truth(truth, meta));
}

} // namespace nsc

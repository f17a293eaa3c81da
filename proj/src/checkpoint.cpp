#include "qotl/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "qotl/csv.hpp"

namespace qotl {

namespace {

constexpr const char* kFormatTag = "qotl-checkpoint-1";

std::string axis_token(Axis a) {
  switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
  }
  throw std::logic_error("axis_token: bad axis");
}

Axis parse_axis(const std::string& tok) {
  if (tok == "X") return Axis::X;
  if (tok == "Y") return Axis::Y;
  if (tok == "Z") return Axis::Z;
  throw std::runtime_error("checkpoint: bad axis token '" + tok + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw std::runtime_error("checkpoint: bad number '" + tok + "'");
  return v;
}

}  // namespace

void KvWriter::put(const std::string& key, const std::string& value) {
  buf_ += key;
  buf_ += " = ";
  buf_ += value;
  buf_ += '\n';
}

void KvWriter::put(const std::string& key, std::int64_t value) { put(key, std::to_string(value)); }

void KvWriter::put(const std::string& key, double value) { put(key, fmt_double(value)); }

void KvWriter::put_doubles(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += fmt_double(values[i]);
  }
  put(key, joined);
}

void KvWriter::put_ints(const std::string& key, const std::vector<int>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += std::to_string(values[i]);
  }
  put(key, joined);
}

void KvWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("KvWriter: cannot open " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw std::runtime_error("KvWriter: write failed for " + path.string());
}

KvReader KvReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("KvReader: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_string(text);
}

KvReader KvReader::from_string(const std::string& text) {
  KvReader reader;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("KvReader: malformed line '" + line + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(' ');
      const auto e = s.find_last_not_of(' ');
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    reader.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return reader;
}

bool KvReader::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

std::string KvReader::get_string(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw std::runtime_error("KvReader: missing key '" + key + "'");
}

std::int64_t KvReader::get_int(const std::string& key) const {
  return static_cast<std::int64_t>(parse_double(get_string(key)));
}

double KvReader::get_double(const std::string& key) const { return parse_double(get_string(key)); }

std::vector<double> KvReader::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_ws(get_string(key))) out.push_back(parse_double(tok));
  return out;
}

std::vector<int> KvReader::get_ints(const std::string& key) const {
  std::vector<int> out;
  for (const auto& tok : split_ws(get_string(key))) out.push_back(static_cast<int>(parse_double(tok)));
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const CircuitSpec& spec,
                     const AdamState* opt) {
  KvWriter w;
  w.put("format", std::string(kFormatTag));
  w.put("n", static_cast<std::int64_t>(spec.qubits()));
  w.put("n_layers", static_cast<std::int64_t>(spec.layers()));
  w.put("n_z", static_cast<std::int64_t>(spec.latent_dim()));
  w.put("family", std::string(spec.family() == Family::HEA ? "hea" : "ala"));
  w.put("entangler", std::string(spec.entangler() == Entangler::CZ ? "cz" : "cx"));
  w.put("block_size", static_cast<std::int64_t>(spec.block_size()));
  std::string xi;
  for (std::size_t i = 0; i < spec.xi().size(); ++i) {
    if (i) xi += ' ';
    xi += axis_token(spec.xi()[i]);
  }
  w.put("xi", xi);
  w.put_ints("eta", spec.eta());
  w.put_doubles("theta", spec.theta());
  if (opt) {
    w.put("adam_t", opt->t);
    w.put_doubles("adam_m", opt->m);
    w.put_doubles("adam_v", opt->v);
  }
  w.write_file(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const KvReader r = KvReader::from_file(path);
  if (r.get_string("format") != kFormatTag)
    throw std::runtime_error("load_checkpoint: unknown format tag");
  const int n = static_cast<int>(r.get_int("n"));
  const int n_layers = static_cast<int>(r.get_int("n_layers"));
  const int n_z = static_cast<int>(r.get_int("n_z"));
  const std::string family_tok = r.get_string("family");
  const std::string ent_tok = r.get_string("entangler");
  const int block_size = static_cast<int>(r.get_int("block_size"));
  std::vector<Axis> xi;
  for (const auto& tok : split_ws(r.get_string("xi"))) xi.push_back(parse_axis(tok));
  const auto eta = r.get_ints("eta");
  const auto theta = r.get_doubles("theta");
  CircuitSpec spec(n, n_layers, n_z, family_tok == "hea" ? Family::HEA : Family::ALA,
                   ent_tok == "cz" ? Entangler::CZ : Entangler::CX, block_size, std::move(xi), eta,
                   theta);
  Checkpoint ck{std::move(spec), std::nullopt};
  if (r.has("adam_t")) {
    AdamState opt;
    opt.t = r.get_int("adam_t");
    opt.m = r.get_doubles("adam_m");
    opt.v = r.get_doubles("adam_v");
    ck.opt = std::move(opt);
  }
  return ck;
}

}  // namespace qotl

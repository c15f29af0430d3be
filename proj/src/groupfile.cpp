#include "groupfile.hpp"

#include "errors.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace escapelab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& key, const std::string& value, std::size_t count) {
  std::istringstream in(value);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof() || out.size() != count) {
    throw ValidationError("group file: '" + key + "' needs " + std::to_string(count) + " numbers");
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SchottkyGroup parse_group(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("group file line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ValidationError("group file line " + std::to_string(lineno) + ": duplicate '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError("group file: missing '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (take("n") != "1") throw ValidationError("group file: only n = 1 is implemented");
  int rank = 0;
  try {
    rank = std::stoi(take("rank"));
  } catch (const std::logic_error&) {
    throw ValidationError("group file: rank must be an integer");
  }
  if (rank < 0 || rank > 16) throw ValidationError("group file: rank must lie in [0, 16]");
  std::vector<Isometry> gens;
  std::vector<EuclideanDisk> minus, plus;
  for (int k = 1; k <= rank; ++k) {
    std::string idx = std::to_string(k);
    auto m = numbers("generator." + idx, take("generator." + idx), 4);
    Mat2 a;
    a << m[0], m[1], m[2], m[3];
    try {
      gens.emplace_back(a);
    } catch (const InvalidIsometryError& e) {
      throw ValidationError("group file: generator." + idx + ": " + e.what());
    }
    auto d = numbers("minus." + idx, take("minus." + idx), 3);
    minus.push_back({Vec2(d[0], d[1]), d[2]});
    d = numbers("plus." + idx, take("plus." + idx), 3);
    plus.push_back({Vec2(d[0], d[1]), d[2]});
  }
  BallPoint base;
  if (kv.count("basepoint")) {
    auto b = numbers("basepoint", take("basepoint"), 2);
    base = BallPoint{Vec2(b[0], b[1])};
  }
  if (!kv.empty()) throw ValidationError("group file: unknown key '" + kv.begin()->first + "'");
  return SchottkyGroup(std::move(gens), std::move(minus), std::move(plus), base);
}

SchottkyGroup load_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open group file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_group(buf.str());
}

std::string format_group(const SchottkyGroup& grp) {
  std::string out = "n = 1\nrank = " + std::to_string(grp.rank()) + "\n";
  for (int k = 0; k < grp.rank(); ++k) {
    std::string idx = std::to_string(k + 1);
    const Mat2& a = grp.generators()[k].matrix();
    out += "generator." + idx + " = " + fmt(a(0, 0)) + " " + fmt(a(0, 1)) + " " + fmt(a(1, 0)) + " " + fmt(a(1, 1)) + "\n";
    const EuclideanDisk& m = grp.minus_disks()[k];
    const EuclideanDisk& p = grp.plus_disks()[k];
    out += "minus." + idx + " = " + fmt(m.center.x()) + " " + fmt(m.center.y()) + " " + fmt(m.radius) + "\n";
    out += "plus." + idx + " = " + fmt(p.center.x()) + " " + fmt(p.center.y()) + " " + fmt(p.radius) + "\n";
  }
  const Vec2& b = grp.basepoint().q;
  out += "basepoint = " + fmt(b.x()) + " " + fmt(b.y()) + "\n";
  return out;
}

}  // namespace escapelab

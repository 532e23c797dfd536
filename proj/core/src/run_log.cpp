#include "csb/run_log.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csb {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void RunLog::validate() const {
  std::int64_t prev = 0;
  const GenerationRecord* best_rec = nullptr;
  for (const GenerationRecord& r : records) {
    if (r.evals_used <= prev)
      throw std::logic_error("run log: evals_used must be strictly increasing");
    prev = r.evals_used;
    if (best_rec == nullptr || r.best_fitness > best_rec->best_fitness)
      best_rec = &r;
  }
  if (!records.empty()) {
    if (records.back().best_fitness != best_rec->best_fitness)
      throw std::logic_error("run log: final record does not carry the max fitness");
    if (records.back().best_fitness != best.fitness)
      throw std::logic_error("run log: final record disagrees with best genome");
  }
}

void write_run_csv(std::ostream& os, const RunLog& log) {
  os << "generation,evals_used,best_fitness,best_cost,best_s\n";
  for (const GenerationRecord& r : log.records) {
    os << r.generation << ',' << r.evals_used << ','
       << format_double(r.best_fitness) << ',' << format_double(r.best_cost)
       << ',' << format_double(r.best_s) << '\n';
  }
}

void write_run_csv_file(const std::string& path, const RunLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write run log: " + path);
  write_run_csv(out, log);
}

RunLog read_run_csv_file(const std::string& path, const std::string& algorithm,
                         std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read run log: " + path);
  RunLog log;
  log.algorithm = algorithm;
  log.seed = seed;
  std::string line;
  if (!std::getline(in, line) ||
      line != "generation,evals_used,best_fitness,best_cost,best_s")
    throw std::runtime_error("bad run log header in " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    GenerationRecord r;
    char comma;
    ls >> r.generation >> comma >> r.evals_used >> comma;
    std::string rest;
    std::getline(ls, rest);
    std::istringstream vs(rest);
    std::string tok;
    double* fields[3] = {&r.best_fitness, &r.best_cost, &r.best_s};
    for (double* f : fields) {
      if (!std::getline(vs, tok, ',')) throw std::runtime_error("bad row in " + path);
      if (tok == "inf") *f = std::numeric_limits<double>::infinity();
      else if (tok == "-inf") *f = -std::numeric_limits<double>::infinity();
      else if (tok == "nan") *f = std::numeric_limits<double>::quiet_NaN();
      else *f = std::stod(tok);
    }
    log.records.push_back(r);
  }
  if (!log.records.empty()) {
    log.best.fitness = log.records.back().best_fitness;
    log.best.cost = log.records.back().best_cost;
    log.best.s = log.records.back().best_s;
  }
  return log;
}

std::string best_genome_json(const RunLog& log) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["algorithm"] = log.algorithm;
  j["seed"] = log.seed;
  j["fitness"] = log.best.fitness;
  j["cost_keur"] = log.best.cost;
  j["s_max"] = log.best.s;
  j["genes"] = log.best_genome.genes;
  return j.dump(2) + "\n";
}

void write_best_genome_file(const std::string& path, const RunLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write genome: " + path);
  out << best_genome_json(log);
}

RunLog read_best_genome_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read genome: " + path);
  nlohmann::json j;
  in >> j;
  RunLog log;
  log.algorithm = j.value("algorithm", "");
  log.seed = j.value("seed", std::uint64_t{0});
  log.best.fitness = j.value("fitness", 0.0);
  log.best.cost = j.value("cost_keur", 0.0);
  log.best.s = j.value("s_max", 0.0);
  const auto& genes = j.at("genes");
  if (genes.size() != kGeneCount)
    throw std::runtime_error("genome must have 22 genes: " + path);
  for (int i = 0; i < kGeneCount; ++i)
    log.best_genome[i] = genes[static_cast<std::size_t>(i)].get<double>();
  return log;
}

}  // namespace csb

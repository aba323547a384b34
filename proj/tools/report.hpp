#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include <nlsf/oracle.hpp>
#include <nlsf/profiles.hpp>
#include <nlsf/solver.hpp>

#include "config.hpp"

namespace nlsf::cli {

using json = nlohmann::ordered_json;

json to_json(const VariationalState &s);
json to_json(const SolveReport &r);
json to_json(const VerificationLedger &l);
json to_json(const RadialProfile &p);
json to_json(const ProfileSet &ps);
json to_json(const std::vector<LedgerRow> &rows);
json to_json(const VanishingTrace &t);
json to_json(const ThetaLedger &t);

/// SHA-1 of "blob <size>\0<bytes>", as git hashes file contents.
std::string git_blob_sha1(const std::string &bytes);
std::string git_blob_sha1(const std::filesystem::path &file);

/// Config echo plus content hashes of every input file.
json manifest(const RunConfig &cfg, const std::string &command);

/// Pretty-printed, newline-terminated; throws std::runtime_error on I/O.
void write_json(const std::filesystem::path &path, const json &j);
json read_json(const std::filesystem::path &path);

/// i,n,LHS,sum,remainder,defect
void write_ledger_csv(const std::filesystem::path &path,
                      const std::vector<LedgerRow> &rows);

} // namespace nlsf::cli

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jko::cli {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "jkolip-config/1";

/// Invalid configuration; `key` is the dotted path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct KindInfo {
    std::string name;
    std::string summary;
    Json defaults;  // every accepted key with its default value
};

const std::vector<KindInfo>& experiment_kinds();
const KindInfo* find_kind(const std::string& name);
/// Schema and defaults of one kind, as printed by `describe`.
std::string describe_kind(const KindInfo& k);

struct RunConfig {
    std::string kind;
    Json params;  // defaults overlaid with the file's values
    std::uint64_t seed = 0;
    std::string output;
    int jobs = 1;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    int jobs = 1;
};

/// Parses and validates; throws ConfigError naming the key at fault.
RunConfig parse_config(const Json& doc, const Overrides& ov = {});
RunConfig load_config(const std::string& path, const Overrides& ov = {});

// Typed accessors; throw ConfigError with the key path.
double number(const Json& obj, const std::string& key, const std::string& where);
int integer(const Json& obj, const std::string& key, const std::string& where);
std::vector<double> number_list(const Json& obj, const std::string& key, const std::string& where);
std::vector<int> integer_list(const Json& obj, const std::string& key, const std::string& where);
void require_keys(const Json& obj, const std::vector<std::string>& allowed, const std::string& where);

}  // namespace jko::cli

#include "mvbid/batch_io.hpp"

#include "mvbid/json_io.hpp"

namespace fs = std::filesystem;

namespace mvbid {

std::vector<fs::path> write_batch(const fs::path& dir, const std::vector<CampaignData>& batch,
                                  LogFormat format) {
  const char* ext = format == LogFormat::csv ? ".csv" : ".jsonl";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  json campaigns = json::array();
  for (const auto& c : batch) {
    const fs::path sub = c.spec.campaign_id;
    fs::create_directories(dir / sub);
    json entry = c.spec;
    for (const auto& [key, log] :
         {std::pair{"train", &c.train}, std::pair{"tune", &c.tune}, std::pair{"test", &c.test}}) {
      const fs::path rel = sub / (std::string(key) + ext);
      write_log(dir / rel, *log);
      entry[key] = rel.generic_string();
      written.push_back(rel);
    }
    campaigns.push_back(std::move(entry));
  }
  write_json_file(dir / "campaigns.json",
                  {{"schema_version", kSchemaVersion}, {"campaigns", std::move(campaigns)}});
  written.insert(written.begin(), "campaigns.json");
  return written;
}

std::vector<CampaignData> read_batch(const fs::path& dir) {
  const json index = read_json_file(dir / "campaigns.json");
  if (!index.contains("campaigns") || !index.at("campaigns").is_array())
    throw DataError((dir / "campaigns.json").string() + ": missing campaigns array");
  std::vector<CampaignData> batch;
  for (const auto& entry : index.at("campaigns")) {
    CampaignData c;
    c.spec = parse_as<CampaignSpec>(entry, "campaigns.json");
    validate(c.spec);
    auto path_of = [&](const char* key) {
      if (!entry.contains(key)) throw DataError("campaigns.json: campaign " + c.spec.campaign_id + " has no " + key + " log");
      return dir / entry.at(key).get<std::string>();
    };
    c.train = load_log(path_of("train"), {}, "train");
    c.tune = load_log(path_of("tune"), {}, "tune");
    c.test = load_log(path_of("test"), {}, "test");
    batch.push_back(std::move(c));
  }
  if (batch.empty()) throw DataError((dir / "campaigns.json").string() + ": no campaigns");
  return batch;
}

}  // namespace mvbid

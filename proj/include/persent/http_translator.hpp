#ifndef PERSENT_HTTP_TRANSLATOR_HPP
#define PERSENT_HTTP_TRANSLATOR_HPP

#include <atomic>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "persent/augment.hpp"
#include "persent/errors.hpp"

// REST translation backend (LibreTranslate-style JSON contract):
//   POST <base>/translate  {"q": text, "source": .., "target": ..[, "api_key": ..]}
//   -> 200 {"translatedText": ...}
// Network use is opt-in: nothing constructs this class unless a URL is
// configured (TRANSLATOR_URL). A request budget guards against runaway use.

namespace persent::augment {

struct HttpTranslatorConfig {
    std::string base_url;             // e.g. http://localhost:5000
    std::string api_key;              // sent as "api_key" when non-empty
    std::size_t max_requests = 1000;  // per-instance budget
    int timeout_seconds = 10;

    // Reads TRANSLATOR_URL / TRANSLATOR_KEY; nullopt when no URL is set.
    static std::optional<HttpTranslatorConfig> from_env() {
        const char* url = std::getenv("TRANSLATOR_URL");
        if (!url || !*url) return std::nullopt;
        HttpTranslatorConfig cfg;
        cfg.base_url = url;
        if (const char* key = std::getenv("TRANSLATOR_KEY")) cfg.api_key = key;
        return cfg;
    }
};

class HttpTranslator : public Translator {
public:
    explicit HttpTranslator(HttpTranslatorConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty())
            throw ConfigError("HttpTranslator: base_url must not be empty");
        std::string rest = cfg_.base_url;
        // Split scheme://host[:port][/path]
        auto scheme_end = rest.find("://");
        if (scheme_end != std::string::npos) rest = rest.substr(scheme_end + 3);
        auto path_start = rest.find('/');
        std::string host_port =
            path_start == std::string::npos ? rest : rest.substr(0, path_start);
        path_prefix_ = path_start == std::string::npos ? "" : rest.substr(path_start);
        if (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
        bool https = cfg_.base_url.rfind("https://", 0) == 0;
        std::string origin = (https ? "https://" : "http://") + host_port;
        client_ = std::make_unique<httplib::Client>(origin);
        client_->set_connection_timeout(cfg_.timeout_seconds, 0);
        client_->set_read_timeout(cfg_.timeout_seconds, 0);
    }

    std::string translate(const std::string& text, const std::string& src,
                          const std::string& dst) override {
        if (requests_.fetch_add(1) >= cfg_.max_requests)
            throw TranslatorError("HttpTranslator: request budget of " +
                                  std::to_string(cfg_.max_requests) + " exhausted");
        nlohmann::json body = {{"q", text}, {"source", src}, {"target", dst}};
        if (!cfg_.api_key.empty()) body["api_key"] = cfg_.api_key;
        auto res = client_->Post(path_prefix_ + "/translate", body.dump(),
                                 "application/json");
        if (!res)
            throw TranslatorError("HttpTranslator: no response from " + cfg_.base_url);
        if (res->status != 200)
            throw TranslatorError("HttpTranslator: HTTP " + std::to_string(res->status) +
                                  " from " + cfg_.base_url);
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("translatedText") ||
            !parsed["translatedText"].is_string())
            throw TranslatorError("HttpTranslator: malformed response body");
        return parsed["translatedText"].get<std::string>();
    }

    std::vector<std::string> synonyms(const std::string& word,
                                      const std::string& lang) override {
        // Round-trip through the middle language; a changed word is the only
        // synonym this backend can offer.
        std::string middle = translate(word, lang, middle_lang_);
        std::string back = translate(middle, middle_lang_, lang);
        if (back.empty() || back == word) return {};
        return {back};
    }

    bool deterministic() const override { return false; }
    std::string name() const override { return "http:" + cfg_.base_url; }

    std::size_t requests_made() const { return requests_.load(); }
    void set_middle_lang(std::string lang) { middle_lang_ = std::move(lang); }

private:
    HttpTranslatorConfig cfg_;
    std::string path_prefix_;
    std::string middle_lang_ = "en";
    std::unique_ptr<httplib::Client> client_;
    std::atomic<std::size_t> requests_{0};
};

}  // namespace persent::augment

#endif  // PERSENT_HTTP_TRANSLATOR_HPP

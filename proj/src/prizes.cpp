#include "lotto/prizes.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "lotto/errors.hpp"

namespace lotto {

double PrizeTable::p_big(Cents threshold_cents) const {
    double p = 0.0;
    for (const PrizeEntry& e : entries) {
        if (e.value_cents > threshold_cents) p += e.probability;
    }
    return p;
}

double PrizeTable::small_return_rate(Cents threshold_cents) const {
    double ev_cents = 0.0;
    for (const PrizeEntry& e : entries) {
        if (e.value_cents <= threshold_cents) {
            ev_cents += static_cast<double>(e.value_cents) * e.probability;
        }
    }
    return ev_cents / static_cast<double>(ticket_cost_cents);
}

double PrizeTable::total_return_rate() const {
    double ev_cents = 0.0;
    for (const PrizeEntry& e : entries) {
        ev_cents += static_cast<double>(e.value_cents) * e.probability;
    }
    return ev_cents / static_cast<double>(ticket_cost_cents);
}

void validate_table(const PrizeTable& table) {
    const auto fail = [&](const std::string& why) {
        throw ValidationError("prize table \"" + table.game_name + "\": " + why);
    };
    if (table.game_name.empty()) fail("game_name is empty");
    if (table.ticket_cost_cents <= 0) fail("ticket cost must be positive");

    double sum = 0.0;
    std::set<Cents> seen;
    for (const PrizeEntry& e : table.entries) {
        if (e.value_cents <= 0) fail("prize values must be positive");
        if (!(e.probability > 0.0)) fail("probabilities must be positive");
        if (!seen.insert(e.value_cents).second) {
            fail("duplicate prize value " + format_usd(e.value_cents));
        }
        sum += e.probability;
    }
    if (sum > 1.0 + 1e-12) fail("probabilities sum to more than 1");
    // p_big = 1 (every ticket pays out a recorded prize) is degenerate but
    // loadable; p_big = 0 tables are rejected at resolve time instead
}

const PrizeTable* PrizeRegistry::find(const std::string& game_name) const {
    const auto it = tables.find(game_name);
    return it == tables.end() ? nullptr : &it->second;
}

namespace {

Cents money_field(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    Cents cents = 0;
    if (v.is_string()) {
        if (!try_parse_usd(v.get<std::string>(), cents)) {
            throw ValidationError(where + ": bad dollar amount in \"" + key + "\"");
        }
    } else if (v.is_number_integer()) {
        cents = v.get<std::int64_t>() * 100;
    } else {
        throw ValidationError(where + ": \"" + std::string(key) +
                              "\" must be a dollar string or whole number");
    }
    return cents;
}

nlohmann::json parse_json_stream(std::istream& source, const std::string& what) {
    try {
        return nlohmann::json::parse(source);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

} // namespace

PrizeRegistry load_prize_tables(std::istream& source) {
    const nlohmann::json doc = parse_json_stream(source, "prize-table file");
    if (!doc.is_object() || !doc.contains("games") || !doc["games"].is_array()) {
        throw ValidationError("prize-table file: expected an object with a \"games\" array");
    }
    PrizeRegistry registry;
    for (const auto& g : doc["games"]) {
        PrizeTable table;
        table.game_name = g.at("game_name").get<std::string>();
        const std::string where = "prize table \"" + table.game_name + "\"";
        table.ticket_cost_cents = money_field(g, "ticket_cost", where);
        for (const auto& e : g.at("entries")) {
            PrizeEntry entry;
            entry.value_cents = money_field(e, "value", where);
            entry.probability = e.at("probability").get<double>();
            table.entries.push_back(entry);
        }
        validate_table(table);
        if (!registry.tables.emplace(table.game_name, std::move(table)).second) {
            throw ValidationError("prize table \"" + g.at("game_name").get<std::string>() +
                                  "\" appears twice");
        }
    }
    return registry;
}

PrizeRegistry load_prize_tables_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open prize-table file: " + path);
    return load_prize_tables(in);
}

void write_prize_tables(std::ostream& out, const PrizeRegistry& registry) {
    nlohmann::json games = nlohmann::json::array();
    for (const auto& [name, table] : registry.tables) {
        nlohmann::json entries = nlohmann::json::array();
        for (const PrizeEntry& e : table.entries) {
            entries.push_back({{"value", format_usd(e.value_cents)},
                               {"probability", e.probability}});
        }
        games.push_back({{"game_name", name},
                         {"ticket_cost", format_usd(table.ticket_cost_cents)},
                         {"entries", std::move(entries)}});
    }
    out << nlohmann::json{{"games", std::move(games)}}.dump(2) << '\n';
}

ReturnRates return_rates_from_totals(int year, double g_all, double g_big, double s_all) {
    if (!(s_all > 0)) throw ValidationError("return rates: sales must be positive");
    if (g_big < 0 || g_big > g_all) {
        throw ValidationError("return rates: need 0 <= g_big <= g_all");
    }
    ReturnRates r;
    r.year = year;
    r.g_all = g_all;
    r.g_big = g_big;
    r.s_all = s_all;
    r.R = g_all / s_all;
    r.R_s = (g_all - g_big) / s_all;
    if (r.R >= 1.0) throw ValidationError("return rates: payout exceeds sales");
    return r;
}

GameMapping load_game_mapping(std::istream& source) {
    const nlohmann::json doc = parse_json_stream(source, "game-mapping file");
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
        throw ValidationError("game-mapping file: expected an object with a \"rules\" array");
    }
    GameMapping mapping;
    for (const auto& r : doc["rules"]) {
        MappingRule rule;
        rule.game = r.at("game").get<std::string>();
        if (r.contains("name")) rule.name = r["name"].get<std::string>();
        if (r.contains("game_type")) {
            GameType t;
            if (!try_parse_game_type(r["game_type"].get<std::string>(), t)) {
                throw ValidationError("game-mapping rule for \"" + rule.game +
                                      "\": bad game_type");
            }
            rule.game_type = t;
        }
        if (r.contains("ticket_cost")) {
            rule.ticket_cost_cents = money_field(r, "ticket_cost", "game-mapping rule");
        }
        const bool by_name = rule.name.has_value();
        const bool by_price = rule.game_type.has_value() && rule.ticket_cost_cents.has_value();
        if (by_name == by_price) {
            throw ValidationError(
                "game-mapping rule for \"" + rule.game +
                "\": must match either a name or a (game_type, ticket_cost) pair");
        }
        mapping.rules.push_back(std::move(rule));
    }
    return mapping;
}

GameMapping load_game_mapping_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open game-mapping file: " + path);
    return load_game_mapping(in);
}

bool try_price_from_name(std::string_view name, Cents& out) {
    const std::size_t dollar = name.find('$');
    if (dollar == std::string_view::npos) return false;
    std::size_t end = dollar + 1;
    while (end < name.size() &&
           (std::isdigit(static_cast<unsigned char>(name[end])) || name[end] == '.' ||
            name[end] == ',')) {
        ++end;
    }
    if (end == dollar + 1) return false;
    return try_parse_usd(name.substr(dollar + 1, end - dollar - 1), out);
}

const PrizeTable& resolve_game(const ClaimRecord& record, const PrizeRegistry& registry,
                               const GameMapping& mapping, Cents big_threshold_cents) {
    const auto finish = [&](const PrizeTable& table) -> const PrizeTable& {
        if (table.p_big(big_threshold_cents) <= 0.0) {
            throw UnusableTableError("game \"" + table.game_name +
                                     "\" has no prize above the recording threshold");
        }
        return table;
    };

    if (const PrizeTable* t = registry.find(record.lottery_name)) return finish(*t);

    Cents name_price = 0;
    const bool has_price = try_price_from_name(record.lottery_name, name_price);
    for (const MappingRule& rule : mapping.rules) {
        bool hit = false;
        if (rule.name.has_value()) {
            hit = (*rule.name == record.lottery_name);
        } else {
            hit = has_price && *rule.game_type == record.game_type &&
                  *rule.ticket_cost_cents == name_price;
        }
        if (!hit) continue;
        if (const PrizeTable* t = registry.find(rule.game)) return finish(*t);
        throw ResolutionError("game-mapping rule points at unknown table \"" + rule.game +
                              "\"");
    }
    throw ResolutionError("no prize table for lottery \"" + record.lottery_name + "\"");
}

} // namespace lotto

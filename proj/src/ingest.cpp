#include "lotto/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "lotto/csv.hpp"
#include "lotto/errors.hpp"

namespace lotto {

std::string_view to_string(GameType t) {
    return t == GameType::ScratchOff ? "scratch_off" : "online";
}

bool try_parse_game_type(std::string_view text, GameType& out) {
    std::string s;
    s.reserve(text.size());
    for (char c : text) {
        if (c == '-' || c == ' ') c = '_';
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    while (!s.empty() && (s.front() == '_')) s.erase(s.begin());
    while (!s.empty() && (s.back() == '_')) s.pop_back();
    if (s == "scratch_off" || s == "scratchoff" || s == "scratch" || s == "instant") {
        out = GameType::ScratchOff;
        return true;
    }
    if (s == "online" || s == "online_game" || s == "draw") {
        out = GameType::Online;
        return true;
    }
    return false;
}

bool claim_less(const ClaimRecord& a, const ClaimRecord& b) {
    const auto key = [](const ClaimRecord& r) {
        return std::tie(r.paid_date, r.lottery_name, r.prize_cents, r.retailer_name,
                        r.retailer_address, r.winner_id, r.city, r.county,
                        r.claim_center, r.game_type);
    };
    return key(a) < key(b);
}

std::string normalize_store_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(uc)));
    }
    const auto trailing_junk = [](char c) {
        return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
               c == ' ';
    };
    while (!out.empty() && trailing_junk(out.back())) out.pop_back();
    return out;
}

StoreKey normalize_store(std::string_view raw_name, std::string_view raw_address) {
    return {normalize_store_text(raw_name), normalize_store_text(raw_address)};
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

ParseResult parse_claims(std::istream& source, const SchemaConfig& schema) {
    CsvReader reader(source, schema.delimiter);
    std::vector<std::string> row;
    if (!reader.next(row)) {
        throw SchemaError("claims input is empty (no header row)");
    }

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < row.size(); ++i) header.emplace(trim(row[i]), i);

    const auto require = [&](const std::string& col) {
        const auto it = header.find(col);
        if (it == header.end()) {
            throw SchemaError("claims input is missing required column \"" + col + "\"");
        }
        return it->second;
    };

    const std::size_t i_winner = require(schema.col_winner);
    const std::size_t i_city = require(schema.col_city);
    const std::size_t i_county = require(schema.col_county);
    const std::size_t i_type = require(schema.col_game_type);
    const std::size_t i_prize = require(schema.col_prize);
    const std::size_t i_lottery = require(schema.col_lottery);
    const std::size_t i_center = require(schema.col_claim_center);
    const std::size_t i_date = require(schema.col_paid_date);
    const std::size_t i_rname = require(schema.col_retailer_name);
    const std::size_t i_raddr = require(schema.col_retailer_address);
    const std::size_t width =
        1 + std::max({i_winner, i_city, i_county, i_type, i_prize, i_lottery, i_center,
                      i_date, i_rname, i_raddr});

    ParseResult result;
    while (reader.next(row)) {
        const std::size_t line = reader.line();
        if (row.size() < width) {
            result.errors.push_back({line, "too few columns"});
            continue;
        }

        ClaimRecord rec;
        rec.winner_id = trim(row[i_winner]);
        rec.city = trim(row[i_city]);
        rec.county = trim(row[i_county]);
        rec.lottery_name = trim(row[i_lottery]);
        rec.claim_center = trim(row[i_center]);
        rec.retailer_name = row[i_rname];
        rec.retailer_address = row[i_raddr];

        if (rec.winner_id.empty()) {
            result.errors.push_back({line, "missing winner identity"});
            continue;
        }
        if (!try_parse_game_type(row[i_type], rec.game_type)) {
            result.errors.push_back({line, "unrecognized game type \"" + trim(row[i_type]) + "\""});
            continue;
        }
        if (!try_parse_usd(row[i_prize], rec.prize_cents)) {
            result.errors.push_back({line, "unparseable prize amount \"" + trim(row[i_prize]) + "\""});
            continue;
        }
        if (rec.prize_cents <= schema.min_exclusive_prize_cents) {
            result.errors.push_back({line, "below recorded-prize threshold"});
            continue;
        }
        if (!try_parse_date(row[i_date], rec.paid_date)) {
            result.errors.push_back({line, "unparseable paid date \"" + trim(row[i_date]) + "\""});
            continue;
        }
        if (rec.paid_date < schema.date_min || schema.date_max < rec.paid_date) {
            result.errors.push_back({line, "paid date outside dataset range"});
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::string player_key(const ClaimRecord& rec, PlayerKeyMode mode) {
    if (mode == PlayerKeyMode::NameCity) return rec.winner_id + "|" + rec.city;
    return rec.winner_id;
}

ProfileMap aggregate_players(const std::vector<ClaimRecord>& records, PlayerKeyMode mode) {
    ProfileMap profiles;
    for (const ClaimRecord& rec : records) {
        PlayerProfile& p = profiles[player_key(rec, mode)];
        p.wins.push_back(rec);
        ++p.store_counts[normalize_store(rec.retailer_name, rec.retailer_address)];
        p.total_cents += rec.prize_cents;
    }
    for (auto& [id, p] : profiles) {
        p.player_id = id;
        std::sort(p.wins.begin(), p.wins.end(), claim_less);
    }
    return profiles;
}

namespace {

nlohmann::json claim_to_json(const ClaimRecord& r) {
    return {
        {"winner", r.winner_id},
        {"city", r.city},
        {"county", r.county},
        {"game_type", std::string(to_string(r.game_type))},
        {"prize_cents", r.prize_cents},
        {"lottery", r.lottery_name},
        {"claim_center", r.claim_center},
        {"paid_date", r.paid_date.iso()},
        {"retailer_name", r.retailer_name},
        {"retailer_address", r.retailer_address},
    };
}

ClaimRecord claim_from_json(const nlohmann::json& j) {
    ClaimRecord r;
    r.winner_id = j.at("winner").get<std::string>();
    r.city = j.at("city").get<std::string>();
    r.county = j.at("county").get<std::string>();
    if (!try_parse_game_type(j.at("game_type").get<std::string>(), r.game_type)) {
        throw ValidationError("bad game_type in profile record");
    }
    r.prize_cents = j.at("prize_cents").get<Cents>();
    r.lottery_name = j.at("lottery").get<std::string>();
    r.claim_center = j.at("claim_center").get<std::string>();
    if (!try_parse_date(j.at("paid_date").get<std::string>(), r.paid_date)) {
        throw ValidationError("bad paid_date in profile record");
    }
    r.retailer_name = j.at("retailer_name").get<std::string>();
    r.retailer_address = j.at("retailer_address").get<std::string>();
    return r;
}

} // namespace

void write_profiles_jsonl(std::ostream& out, const ProfileMap& profiles) {
    for (const auto& [id, p] : profiles) {
        nlohmann::json j{
            {"player", id},
            {"win_count", p.win_count()},
            {"total_cents", p.total_cents},
        };
        auto wins = nlohmann::json::array();
        for (const ClaimRecord& r : p.wins) wins.push_back(claim_to_json(r));
        j["wins"] = std::move(wins);
        out << j.dump() << '\n';
    }
}

ProfileMap read_profiles_jsonl(std::istream& in) {
    ProfileMap profiles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("profiles line " + std::to_string(line_no) +
                                  " is not valid: " + e.what());
        }
        PlayerProfile p;
        p.player_id = j.at("player").get<std::string>();
        for (const auto& w : j.at("wins")) {
            ClaimRecord rec = claim_from_json(w);
            ++p.store_counts[normalize_store(rec.retailer_name, rec.retailer_address)];
            p.total_cents += rec.prize_cents;
            p.wins.push_back(std::move(rec));
        }
        std::sort(p.wins.begin(), p.wins.end(), claim_less);
        if (p.win_count() != j.at("win_count").get<std::int64_t>() ||
            p.total_cents != j.at("total_cents").get<Cents>()) {
            throw ValidationError("profile for \"" + p.player_id +
                                  "\" fails its own win-count or total check");
        }
        profiles.emplace(p.player_id, std::move(p));
    }
    return profiles;
}

void write_errors_csv(std::ostream& out, const std::vector<RowError>& errors) {
    out << "line,reason\n";
    for (const RowError& e : errors) {
        out << e.line << ',' << csv_escape(e.reason) << '\n';
    }
}

} // namespace lotto

#include "finsim/dump.hpp"

#include "finsim/errors.hpp"
#include "finsim/serialize.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace finsim {

namespace {

std::vector<std::uint8_t> from_hex(const std::string& hex, const std::string& what) {
    if (hex.size() % 2 != 0) {
        throw DomainError(what + ": odd-length hex");
    }
    auto nibble = [&](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw DomainError(what + ": bad hex character");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]);
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    if (text.empty()) throw DomainError(what + ": empty number");
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw DomainError(what + ": bad number \"" + text + "\"");
        const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
        if (value > (UINT64_MAX - digit) / 10) throw DomainError(what + ": number overflows");
        value = value * 10 + digit;
    }
    return value;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

std::string ledger_dump(const Ledger& ledger) {
    std::ostringstream out;
    for (const LogEntry& entry : ledger.live_entries()) {
        out << entry.position << '\t' << entry_kind_name(entry.kind) << '\t' << entry.appended_at
            << '\t' << entry_digest(entry.kind).hex() << '\n';
    }
    return out.str();
}

std::string calldata_dump(const Ledger& ledger, const AvailabilityStore& store, Tick now) {
    std::ostringstream out;
    for (const LogEntry& entry : ledger.live_entries()) {
        const auto* oc = std::get_if<OrderCommitEntry>(&entry.kind);
        if (!oc) continue;
        for (std::size_t i = 0; i < oc->refs.size(); ++i) {
            const CallDataRef& ref = oc->refs[i];
            out << entry.position << '\t' << i << '\t' << calldata_digest(ref).hex() << '\t';
            if (const auto* inl = std::get_if<InlineRef>(&ref)) {
                out << "inline\t" << to_hex(inl->bytes);
            } else {
                const Digest& digest = std::get<CasRef>(ref).digest;
                if (!store.known(digest)) {
                    out << "dropped\t-";
                } else if (store.withheld_at(digest, now)) {
                    out << "withheld\t-";
                } else {
                    out << "available\t" << to_hex(*store.fetch(digest, now));
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string export_checkpoint(const Checkpoint& cp) {
    std::ostringstream out;
    out << "checkpoint_id\t" << cp.checkpoint_id << '\n';
    out << "named_position\t" << cp.named_position << '\n';
    out << "commitment\t" << commit(cp.value).hex() << '\n';
    out << "state\t" << to_hex(canonical_serialize(cp.value)) << '\n';
    return out.str();
}

Checkpoint import_checkpoint(const std::string& text) {
    std::map<std::string, std::string> fields;
    for (const std::string& line : lines_of(text)) {
        const std::vector<std::string> kv = split(line, '\t');
        if (kv.size() != 2) {
            throw DomainError("checkpoint export: malformed line \"" + line + "\"");
        }
        fields[kv[0]] = kv[1];
    }
    for (const char* key : {"checkpoint_id", "named_position", "commitment", "state"}) {
        if (!fields.count(key)) {
            throw DomainError("checkpoint export: missing field \"" + std::string(key) + "\"");
        }
    }
    Checkpoint cp;
    cp.checkpoint_id = parse_u64(fields["checkpoint_id"], "checkpoint export");
    cp.named_position = parse_u64(fields["named_position"], "checkpoint export");
    const std::vector<std::uint8_t> blob = from_hex(fields["state"], "checkpoint export state");
    cp.value = canonical_deserialize(blob);
    if (commit(cp.value).hex() != fields["commitment"]) {
        throw DomainError("checkpoint export: commitment does not match the embedded state");
    }
    cp.finalized_at = 0;  // an exported checkpoint is trusted as finalized
    return cp;
}

std::map<std::uint64_t, ExecStatus> statuses_from_metrics_csv(const std::string& csv) {
    std::map<std::uint64_t, ExecStatus> statuses;
    for (const std::string& line : lines_of(csv)) {
        if (line.rfind("txn_id,", 0) == 0) continue;  // header
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() < 6) {
            throw DomainError("metrics csv: malformed line \"" + line + "\"");
        }
        const std::string& status = cells[5];
        std::optional<ExecStatus> parsed;
        if (status == "committed") parsed = ExecStatus::Committed;
        else if (status == "aborted") parsed = ExecStatus::Aborted;
        else if (status == "gas_exhausted") parsed = ExecStatus::GasExhausted;
        if (parsed) {
            statuses[parse_u64(cells[0], "metrics csv txn_id")] = *parsed;
        }
    }
    return statuses;
}

FileReplay replay_from_files(const std::string& ledger_tsv, const std::string& calldata_tsv,
                             const Checkpoint& checkpoint, const VmSemantics& semantics,
                             const std::map<std::uint64_t, ExecStatus>* statuses) {
    // Positions of OrderCommit entries past the checkpoint.
    std::vector<std::uint64_t> wanted;
    for (const std::string& line : lines_of(ledger_tsv)) {
        const std::vector<std::string> cells = split(line, '\t');
        if (cells.size() != 4) {
            throw DomainError("ledger dump: malformed line \"" + line + "\"");
        }
        const std::uint64_t position = parse_u64(cells[0], "ledger dump position");
        if (cells[1] == "order_commit" && position > checkpoint.named_position) {
            wanted.push_back(position);
        }
    }

    struct Row {
        std::uint64_t position;
        std::uint64_t index;
        Transaction txn;
    };
    std::vector<Row> rows;
    for (const std::string& line : lines_of(calldata_tsv)) {
        const std::vector<std::string> cells = split(line, '\t');
        if (cells.size() != 5) {
            throw DomainError("callData dump: malformed line \"" + line + "\"");
        }
        const std::uint64_t position = parse_u64(cells[0], "callData dump position");
        if (!std::binary_search(wanted.begin(), wanted.end(), position)) continue;
        if (cells[4] == "-") {
            throw RecordsUnavailable("callData " + cells[2] + " for position " +
                                     std::to_string(position) + " was " + cells[3] +
                                     "; replay cannot proceed");
        }
        const std::vector<std::uint8_t> payload = from_hex(cells[4], "callData dump payload");
        if (sha256(payload).hex() != cells[2]) {
            throw DomainError("callData dump: payload does not match digest " + cells[2]);
        }
        rows.push_back({position, parse_u64(cells[1], "callData dump index"),
                        deserialize_txn(payload)});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::pair(a.position, a.index) < std::pair(b.position, b.index);
    });

    std::vector<Transaction> order;
    for (Row& row : rows) {
        if (statuses && !statuses->count(row.txn.txn_id)) continue;
        order.push_back(std::move(row.txn));
    }

    FileReplay out;
    out.result = replay_order(checkpoint.value, order, make_interpreter(semantics), statuses);
    out.head = commit(out.result.final_state);
    return out;
}

} // namespace finsim

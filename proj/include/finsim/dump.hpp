#pragma once

// Flat-file renderings of a finished run: the tab-separated ledger dump and
// callData table used by golden-file tests, plus the checkpoint export that
// doubles as the replay fixture. The three files together are enough to
// recompute the head commitment offline.

#include "finsim/checkpoint.hpp"
#include "finsim/ledger.hpp"
#include "finsim/txn.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace finsim {

// One line per live entry: position, kind, tick, entry digest hex.
std::string ledger_dump(const Ledger& ledger);

// One line per callData ref of every live OrderCommit entry: position, ref
// index, payload digest hex, status (inline|available|withheld|dropped),
// payload hex or "-".
std::string calldata_dump(const Ledger& ledger, const AvailabilityStore& store, Tick now);

// checkpoint_id, named_position, commitment, state; one tab-separated
// key/value pair per line, state as canonical serialization hex.
std::string export_checkpoint(const Checkpoint& cp);

// Rejects exports whose commitment does not match the embedded state.
Checkpoint import_checkpoint(const std::string& text);

// Recorded outcomes parsed back out of the metrics CSV. Rejected and
// implicitly aborted transactions are absent: they never executed.
std::map<std::uint64_t, ExecStatus> statuses_from_metrics_csv(const std::string& csv);

struct FileReplay {
    ReplayResult result;
    StateCommitment head;
};

// Replays the post-checkpoint order reconstructed from the two dumps. When
// `statuses` is non-null, transactions absent from it are skipped (they
// never executed in the recorded run) and outcome flips are counted.
FileReplay replay_from_files(const std::string& ledger_tsv, const std::string& calldata_tsv,
                             const Checkpoint& checkpoint, const VmSemantics& semantics,
                             const std::map<std::uint64_t, ExecStatus>* statuses = nullptr);

} // namespace finsim

/**
 * Copyright shardsim authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "shardsim/synchro/validator.hpp"

#include <algorithm>
#include <stdexcept>

namespace shardsim::synchro {

  std::string to_string(GvError e) {
    switch (e) {
      case GvError::kIncompleteGroup: return "IncompleteGroup";
      case GvError::kProofInvalid: return "ProofInvalid";
      case GvError::kParentMismatch: return "ParentMismatch";
      case GvError::kAtomicityViolation: return "AtomicityViolation";
    }
    return "unknown";
  }

  namespace {
    struct Group {
      Digest hash;
      std::vector<std::vector<const Submission *>> by_shard;
      size_t tx_count = 0;
      size_t support = 0;
      bool complete = false;
    };

    std::vector<Group> group_submissions(const GvRequest &rq, uint32_t s) {
      std::map<Digest, Group> groups;
      for (const auto &sub : rq.submissions) {
        const auto &c = sub.chunk;
        if (!c.block_hash || c.height != rq.height || c.shard.value >= s) continue;
        auto &g = groups[*c.block_hash];
        if (g.by_shard.empty()) {
          g.hash = *c.block_hash;
          g.by_shard.resize(s);
        }
        g.by_shard[c.shard.value].push_back(&sub);
        ++g.support;
      }
      std::vector<Group> out;
      for (auto &[h, g] : groups) {
        g.complete = std::all_of(g.by_shard.begin(), g.by_shard.end(),
                                 [](const auto &v) { return !v.empty(); });
        for (const auto &v : g.by_shard) {
          if (!v.empty()) g.tx_count += v.front()->chunk.txs.size();
        }
        out.push_back(std::move(g));
      }
      std::stable_sort(out.begin(), out.end(), [](const Group &a, const Group &b) {
        if (a.complete != b.complete) return a.complete;
        if (a.tx_count != b.tx_count) return a.tx_count > b.tx_count;
        if (a.support != b.support) return a.support > b.support;
        return a.hash < b.hash;
      });
      return out;
    }
  }  // namespace

  GvOutcome gv_reconstruct_and_finalize(const GvRequest &rq) {
    const auto &shards = *rq.shards;
    auto s = shards.shard_count();
    GvOutcome out;
    auto groups = group_submissions(rq, s);
    for (auto &g : groups) {
      if (!g.complete) {
        out.rejected.emplace_back(g.hash, GvError::kIncompleteGroup);
        continue;
      }
      std::vector<Chunk> chunks;
      std::vector<RoleId> used;
      bool ok = true;
      for (uint32_t i = 0; i < s && ok; ++i) {
        auto &subs = g.by_shard[i];
        std::vector<RoleId> provers;
        for (const auto *sub : subs) provers.push_back(sub->chunk.producer);
        auto order = order_by_trust(*rq.trust, provers, rq.rotation);
        // Stable mapping from the trust order back to submissions.
        std::vector<const Submission *> tried;
        std::vector<bool> taken(subs.size(), false);
        for (const auto &r : order) {
          for (size_t k = 0; k < subs.size(); ++k) {
            if (!taken[k] && subs[k]->chunk.producer == r) {
              taken[k] = true;
              tried.push_back(subs[k]);
              break;
            }
          }
        }
        const Submission *good = nullptr;
        for (const auto *sub : tried) {
          ++out.proofs_checked;
          out.verify_cost += rq.t_zk_v;
          if (sub->proof && rq.proofs->verify(*sub->proof, sub->chunk)) {
            good = sub;
            break;
          }
        }
        if (!good) {
          out.rejected.emplace_back(g.hash, GvError::kProofInvalid);
          ok = false;
          break;
        }
        chunks.push_back(good->chunk);
        used.push_back(good->chunk.producer);
      }
      if (!ok) continue;
      bool roots_continue = rq.parent_roots.size() == s;
      for (uint32_t i = 0; i < s && roots_continue; ++i) {
        roots_continue = chunks[i].pre_state_root == rq.parent_roots[i];
      }
      if (!roots_continue
          || nightshade::compute_block_hash(rq.height, rq.parent_hash, chunks) != g.hash) {
        out.rejected.emplace_back(g.hash, GvError::kParentMismatch);
        continue;
      }
      Block b;
      b.height = rq.height;
      b.parent = rq.parent_hash;
      b.chunks = std::move(chunks);
      b.block_hash = g.hash;
      if (!check_atomicity(b, shards)) {
        out.rejected.emplace_back(g.hash, GvError::kAtomicityViolation);
        continue;
      }
      out.block = std::move(b);
      out.producers = std::move(used);
      return out;
    }
    out.error = out.rejected.empty() ? GvError::kIncompleteGroup : out.rejected.back().second;
    return out;
  }

  size_t fork_choice(std::span<const std::vector<ForkBlock>> forks) {
    if (forks.empty()) throw std::invalid_argument("no forks");
    size_t best = 0;
    uint64_t best_weight = 0;
    for (size_t i = 0; i < forks.size(); ++i) {
      uint64_t w = 0;
      for (const auto &b : forks[i]) w += b.signatures;
      const auto &f = forks[i];
      if (i == 0 || w > best_weight
          || (w == best_weight && !f.empty() && !forks[best].empty()
              && f.back().hash < forks[best].back().hash)) {
        best = i;
        best_weight = w;
      }
    }
    return best;
  }

  BlockTree::BlockTree(const Block &genesis) : genesis_(genesis.block_hash) {
    Node n;
    n.hash = genesis.block_hash;
    n.height = genesis.height;
    nodes_.emplace(n.hash, std::move(n));
  }

  void BlockTree::add(const Block &block, const RoleId &signer,
                      const ledger::ShardMap &shards) {
    auto it = nodes_.find(block.block_hash);
    if (it == nodes_.end()) {
      if (!nodes_.contains(block.parent)) {
        throw std::invalid_argument("unknown parent for block at height "
                                    + std::to_string(block.height));
      }
      Node n;
      n.hash = block.block_hash;
      n.parent = block.parent;
      n.height = block.height;
      n.tx_count = block.tx_count();
      n.atomic = check_atomicity(block, shards);
      it = nodes_.emplace(n.hash, std::move(n)).first;
      ++children_[block.parent];
    }
    it->second.signers.insert(signer);
  }

  const BlockTree::Node *BlockTree::find(const Digest &hash) const {
    auto it = nodes_.find(hash);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  std::vector<const BlockTree::Node *> BlockTree::chain_to(const Digest &tip) const {
    std::vector<const Node *> out;
    const Node *n = find(tip);
    while (n) {
      out.push_back(n);
      if (n->hash == genesis_) break;
      n = find(n->parent);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::vector<Digest> BlockTree::leaves() const {
    std::vector<Digest> out;
    for (const auto &[h, n] : nodes_) {
      if (!children_.contains(h)) out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  Digest BlockTree::best_tip() const {
    auto tips = leaves();
    std::vector<std::vector<ForkBlock>> forks;
    for (const auto &t : tips) {
      std::vector<ForkBlock> f;
      for (const auto *n : chain_to(t)) f.push_back({n->hash, n->signers.size()});
      forks.push_back(std::move(f));
    }
    return tips[fork_choice(forks)];
  }

}  // namespace shardsim::synchro

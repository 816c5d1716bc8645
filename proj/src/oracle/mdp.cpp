#include "oracle/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "common/error.hpp"

namespace trustpcl::oracle {

using nlohmann::json;

void TabularMdp::validate() const {
  if (num_states < 1 || num_actions < 1) throw ConfigError("mdp: need at least one state and one action");
  if (static_cast<int>(transitions.size()) != num_states) throw ConfigError("mdp: transitions has wrong row count");
  if (rewards.rows() != num_states || rewards.cols() != num_actions) throw ConfigError("mdp: rewards has wrong shape");
  if (!rewards.allFinite()) throw DomainError("mdp: rewards must be finite");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("mdp: gamma must lie in (0, 1]");
  if (horizon && *horizon < 1) throw ConfigError("mdp: horizon must be >= 1");
  if (start_state < 0 || start_state >= num_states) throw ConfigError("mdp: start_state out of range");
  for (int s = 0; s < num_states; ++s) {
    if (static_cast<int>(transitions[s].size()) != num_actions) throw ConfigError("mdp: transitions row has wrong width");
    for (int a = 0; a < num_actions; ++a) {
      const Vec& p = transitions[s][a];
      if (p.size() != num_states) throw ConfigError("mdp: transition distribution has wrong length");
      if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-12) {
        throw DomainError("mdp: transition row (" + std::to_string(s) + ", " + std::to_string(a) +
                          ") is not a distribution");
      }
    }
  }
}

bool TabularMdp::deterministic() const {
  for (const auto& row : transitions) {
    for (const auto& p : row) {
      if (p.maxCoeff() != 1.0) return false;
    }
  }
  return true;
}

int TabularMdp::next_state(int s, int a) const {
  Eigen::Index best = 0;
  transitions[s][a].maxCoeff(&best);
  return static_cast<int>(best);
}

TabularMdp mdp_from_json(const json& j) {
  TabularMdp m;
  try {
    m.num_states = j.at("num_states").get<int>();
    m.num_actions = j.at("num_actions").get<int>();
    if (m.num_states < 1 || m.num_actions < 1) throw ConfigError("mdp: need at least one state and one action");
    const auto& tr = j.at("transitions");
    const auto& rw = j.at("rewards");
    if (!tr.is_array() || static_cast<int>(tr.size()) != m.num_states) throw ConfigError("mdp: transitions has wrong row count");
    if (!rw.is_array() || static_cast<int>(rw.size()) != m.num_states) throw ConfigError("mdp: rewards has wrong row count");
    m.rewards = Mat::Zero(m.num_states, m.num_actions);
    m.transitions.assign(m.num_states, std::vector<Vec>(m.num_actions, Vec::Zero(m.num_states)));
    for (int s = 0; s < m.num_states; ++s) {
      if (static_cast<int>(tr[s].size()) != m.num_actions || static_cast<int>(rw[s].size()) != m.num_actions) {
        throw ConfigError("mdp: row " + std::to_string(s) + " has wrong width");
      }
      for (int a = 0; a < m.num_actions; ++a) {
        m.rewards(s, a) = rw[s][a].get<double>();
        const auto& entry = tr[s][a];
        if (entry.is_number_integer()) {
          const int next = entry.get<int>();
          if (next < 0 || next >= m.num_states) throw ConfigError("mdp: next state out of range");
          m.transitions[s][a][next] = 1.0;
        } else {
          const auto row = entry.get<std::vector<double>>();
          if (static_cast<int>(row.size()) != m.num_states) throw ConfigError("mdp: transition row has wrong length");
          for (int k = 0; k < m.num_states; ++k) m.transitions[s][a][k] = row[k];
        }
      }
    }
    if (j.contains("horizon") && !j["horizon"].is_null()) m.horizon = j["horizon"].get<int>();
    if (j.contains("gamma")) m.gamma = j["gamma"].get<double>();
    if (j.contains("start_state")) m.start_state = j["start_state"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mdp: ") + e.what());
  }
  m.validate();
  return m;
}

json mdp_to_json(const TabularMdp& m) {
  json j;
  j["num_states"] = m.num_states;
  j["num_actions"] = m.num_actions;
  json tr = json::array();
  json rw = json::array();
  const bool det = m.deterministic();
  for (int s = 0; s < m.num_states; ++s) {
    json tr_row = json::array();
    json rw_row = json::array();
    for (int a = 0; a < m.num_actions; ++a) {
      if (det) {
        tr_row.push_back(m.next_state(s, a));
      } else {
        const Vec& p = m.transitions[s][a];
        tr_row.push_back(std::vector<double>(p.data(), p.data() + p.size()));
      }
      rw_row.push_back(m.rewards(s, a));
    }
    tr.push_back(tr_row);
    rw.push_back(rw_row);
  }
  j["transitions"] = tr;
  j["rewards"] = rw;
  j["horizon"] = m.horizon ? json(*m.horizon) : json(nullptr);
  j["gamma"] = m.gamma;
  j["start_state"] = m.start_state;
  return j;
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read MDP file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("MDP file " + path + " is not valid JSON: " + e.what());
  }
  return mdp_from_json(j);
}

TabularMdp default_chain() {
  TabularMdp m;
  m.num_states = 6;
  m.num_actions = 2;
  m.gamma = 0.9;
  m.horizon = 20;
  m.start_state = 0;
  m.rewards = Mat::Zero(6, 2);
  m.transitions.assign(6, std::vector<Vec>(2, Vec::Zero(6)));
  for (int s = 0; s < 6; ++s) {
    m.transitions[s][0][std::max(s - 1, 0)] = 1.0;  // left
    m.transitions[s][1][std::min(s + 1, 5)] = 1.0;  // right
  }
  m.rewards(0, 0) = 0.2;
  m.rewards(5, 1) = 1.0;
  return m;
}

}  // namespace trustpcl::oracle

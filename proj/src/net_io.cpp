#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "aa/errors.hpp"
#include "aa/petri.hpp"

namespace aa {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

PetriNet parse_tnet(std::string_view text, Alphabet seed) {
  PetriNet net(std::move(seed));
  std::unordered_map<std::string, PlaceId> places;
  std::unordered_map<std::string, TransitionId> transitions;
  std::optional<std::vector<PlaceId>> m0, mf;

  auto place_list = [&](const std::vector<std::string>& toks, std::size_t line) {
    std::vector<PlaceId> out;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      auto it = places.find(toks[i]);
      if (it == places.end()) throw ParseError("undeclared place '" + toks[i] + "'", line);
      out.push_back(it->second);
    }
    return out;
  };

  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto toks = split_ws(raw);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "place") {
      if (toks.size() != 2) throw ParseError("expected 'place <id>'", line_no);
      if (places.count(toks[1]) || transitions.count(toks[1])) throw ParseError("duplicate id '" + toks[1] + "'", line_no);
      places.emplace(toks[1], net.add_place(toks[1]));
    } else if (kw == "trans") {
      if (toks.size() != 2 && !(toks.size() == 4 && toks[2] == "label"))
        throw ParseError("expected 'trans <id> label <name>'", line_no);
      if (places.count(toks[1]) || transitions.count(toks[1])) throw ParseError("duplicate id '" + toks[1] + "'", line_no);
      const std::string& label = toks.size() == 4 ? toks[3] : toks[1];
      transitions.emplace(toks[1], net.add_transition(toks[1], std::string_view(label)));
    } else if (kw == "arc") {
      if (toks.size() != 3) throw ParseError("expected 'arc <from> <to>'", line_no);
      const auto fp = places.find(toks[1]);
      const auto ft = transitions.find(toks[1]);
      const auto tp = places.find(toks[2]);
      const auto tt = transitions.find(toks[2]);
      if (fp != places.end() && tt != transitions.end()) {
        net.add_input(tt->second, fp->second);
      } else if (ft != transitions.end() && tp != places.end()) {
        net.add_output(ft->second, tp->second);
      } else {
        const bool from_known = fp != places.end() || ft != transitions.end();
        const std::string& missing = from_known ? toks[2] : toks[1];
        if (!places.count(missing) && !transitions.count(missing))
          throw ParseError("undeclared node '" + missing + "'", line_no);
        throw ParseError("arc must connect a place and a transition", line_no);
      }
    } else if (kw == "m0") {
      m0 = place_list(toks, line_no);
    } else if (kw == "mf") {
      mf = place_list(toks, line_no);
    } else {
      throw ParseError("unknown keyword '" + kw + "'", line_no);
    }
  }
  if (!m0) throw MissingMarking("no 'm0' line");
  if (!mf) throw MissingMarking("no 'mf' line");
  net.set_initial(*m0);
  net.set_final(*mf);
  return net;
}

using boost::property_tree::ptree;

int token_count(const ptree& node, const std::string& what) {
  const auto text = node.get<std::string>("text", "");
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    if (v > 1) throw ParseError("more than one token in a safe net", 0, what);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad token count '" + text + "'", 0, what);
  }
}

struct PnmlCollector {
  std::vector<const ptree*> places, transitions, arcs;
  const ptree* finalmarkings = nullptr;

  void walk(const ptree& node) {
    for (const auto& [tag, child] : node) {
      if (tag == "place") places.push_back(&child);
      else if (tag == "transition") transitions.push_back(&child);
      else if (tag == "arc") arcs.push_back(&child);
      else if (tag == "page") walk(child);
      else if (tag == "finalmarkings" || tag == "mf") finalmarkings = &child;
    }
  }
};

bool is_invisible(const ptree& transition) {
  for (const auto& [tag, child] : transition) {
    if (tag != "toolspecific") continue;
    if (child.get<std::string>("<xmlattr>.activity", "") == "$invisible$") return true;
  }
  return false;
}

PetriNet parse_pnml(std::string_view text, Alphabet seed) {
  ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_xml(in, tree, boost::property_tree::xml_parser::trim_whitespace);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  const auto net_node = tree.get_child_optional("pnml.net");
  if (!net_node) throw ParseError("missing <pnml><net>", 0, "pnml");

  PnmlCollector nodes;
  nodes.walk(*net_node);

  PetriNet net(std::move(seed));
  std::unordered_map<std::string, PlaceId> places;
  std::unordered_map<std::string, TransitionId> transitions;
  std::vector<PlaceId> m0, mf;
  bool has_m0 = false, has_mf = false;

  for (const ptree* p : nodes.places) {
    const auto id = p->get<std::string>("<xmlattr>.id", "");
    if (id.empty()) throw ParseError("place without id", 0, "place");
    if (places.count(id)) throw ParseError("duplicate place id '" + id + "'", 0, "place");
    const PlaceId pid = net.add_place(id);
    places.emplace(id, pid);
    if (auto init = p->get_child_optional("initialMarking")) {
      has_m0 = true;
      if (token_count(*init, "place id=" + id) == 1) m0.push_back(pid);
    }
    if (auto fin = p->get_child_optional("finalMarking")) {
      has_mf = true;
      if (token_count(*fin, "place id=" + id) == 1) mf.push_back(pid);
    }
  }
  for (const ptree* t : nodes.transitions) {
    const auto id = t->get<std::string>("<xmlattr>.id", "");
    if (id.empty()) throw ParseError("transition without id", 0, "transition");
    if (transitions.count(id) || places.count(id)) throw ParseError("duplicate id '" + id + "'", 0, "transition");
    std::string label = t->get<std::string>("name.text", "");
    if (label.empty()) label = id;
    const TransitionId tid = is_invisible(*t) ? net.add_transition(id, net.alphabet().silent())
                                              : net.add_transition(id, std::string_view(label));
    transitions.emplace(id, tid);
  }
  for (const ptree* a : nodes.arcs) {
    const auto src = a->get<std::string>("<xmlattr>.source", "");
    const auto dst = a->get<std::string>("<xmlattr>.target", "");
    const std::string ctx = "arc id=" + a->get<std::string>("<xmlattr>.id", "?");
    if (auto inscription = a->get_optional<std::string>("inscription.text"); inscription && *inscription != "1")
      throw ParseError("weighted arcs are not supported", 0, ctx);
    if (places.count(src) && transitions.count(dst)) {
      net.add_input(transitions.at(dst), places.at(src));
    } else if (transitions.count(src) && places.count(dst)) {
      net.add_output(transitions.at(src), places.at(dst));
    } else {
      throw ParseError("arc endpoints '" + src + "' -> '" + dst + "' are not a declared place/transition pair", 0, ctx);
    }
  }
  if (nodes.finalmarkings) {
    has_mf = true;
    const ptree* marking = nodes.finalmarkings;
    if (auto inner = nodes.finalmarkings->get_child_optional("marking")) marking = &*inner;
    for (const auto& [tag, child] : *marking) {
      if (tag != "place") continue;
      const auto ref = child.get<std::string>("<xmlattr>.idref", "");
      auto it = places.find(ref);
      if (it == places.end()) throw ParseError("final marking references unknown place '" + ref + "'", 0, "finalmarkings");
      if (token_count(child, "finalmarkings") == 1) mf.push_back(it->second);
    }
  }
  if (!has_m0) throw MissingMarking("PNML net has no <initialMarking>");
  if (!has_mf) throw MissingMarking("PNML net has no final marking");
  net.set_initial(m0);
  net.set_final(mf);
  return net;
}

}  // namespace

PetriNet parse_net(std::string_view text, NetFormat format, Alphabet seed) {
  return format == NetFormat::Tnet ? parse_tnet(text, std::move(seed)) : parse_pnml(text, std::move(seed));
}

std::string serialize_tnet(const PetriNet& net) {
  std::ostringstream out;
  for (PlaceId p = 0; p < net.place_count(); ++p) out << "place " << net.place_name(p) << "\n";
  for (TransitionId t = 0; t < net.transition_count(); ++t)
    out << "trans " << net.transition_name(t) << " label " << net.alphabet().name(net.label(t)) << "\n";
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    for (PlaceId p : net.pre(t)) out << "arc " << net.place_name(p) << " " << net.transition_name(t) << "\n";
    for (PlaceId p : net.post(t)) out << "arc " << net.transition_name(t) << " " << net.place_name(p) << "\n";
  }
  out << "m0";
  for (PlaceId p : net.initial().places()) out << " " << net.place_name(p);
  out << "\nmf";
  for (PlaceId p : net.final_marking().places()) out << " " << net.place_name(p);
  out << "\n";
  return out.str();
}

}  // namespace aa

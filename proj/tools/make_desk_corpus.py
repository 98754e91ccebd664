#!/usr/bin/env python3
# Copyright 2026 The versekit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled desk corpus under data/.

The corpus is synthetic: twelve poet "voices", each drawing ABAB quatrains
from its own slice of a shared verse grammar and vocabulary. Output is fully
determined by --seed, so re-running reproduces the committed files.
"""

import argparse
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent

POETS = [
    "ashgrove", "brightwater", "cindermoor", "dunmere", "elderwick",
    "fallowmere", "greyholt", "hollins", "ivybridge", "juniper",
    "kestrel_lane", "larkspur",
]

# Rhyme families: every member shares the suffix from its last stressed vowel.
RHYMES = {
    "sea": ["sea", "tree", "bee", "lea", "glee", "key"],
    "light": ["light", "night", "sight", "flight", "height", "kite"],
    "day": ["day", "way", "bay", "ray", "clay", "spray", "hay", "play"],
    "tide": ["tide", "side", "bride", "pride", "stride"],
    "ground": ["ground", "sound", "mound", "hound"],
    "rest": ["rest", "nest", "west", "breast", "quest", "crest"],
    "shore": ["shore", "door", "floor", "core", "lore", "oar"],
    "hill": ["hill", "rill", "mill", "sill", "will"],
    "stone": ["stone", "bone", "throne", "cone", "tone"],
    "rain": ["rain", "lane", "plain", "grain", "chain", "mane"],
    "moon": ["moon", "tune", "dune", "noon", "spoon"],
    "star": ["star", "car", "bar", "jar", "scar"],
    "bed": ["bed", "thread", "head", "bread", "shed", "sled"],
    "spring": ["spring", "wing", "string", "ring", "king", "thing"],
    "pine": ["pine", "vine", "line", "wine", "shrine"],
    "hall": ["hall", "wall", "fall", "ball", "call", "shawl"],
    "deer": ["deer", "pier", "spear", "year", "cheer"],
    "gate": ["gate", "plate", "slate", "freight", "date"],
}

ADJ = [
    "silver", "golden", "gentle", "quiet", "ancient", "bitter", "tender",
    "lonely", "restless", "silent", "distant", "wild", "pale", "bright",
    "dark", "cruel", "sweet", "weary", "hollow", "crimson", "scarlet",
    "tranquil", "mournful", "radiant", "wandering", "secret", "humble",
    "holy", "faded", "cold", "warm", "shining", "broken", "little", "sad",
    "stormy", "patient", "fragrant", "early", "awful",
]
NOUN = [
    "heart", "wind", "river", "voice", "song", "dream", "shadow", "flower",
    "morning", "evening", "silence", "sorrow", "meadow", "garden", "forest",
    "mountain", "soul", "memory", "spirit", "summer", "winter", "autumn",
    "candle", "feather", "harbor", "valley", "orchard", "lantern", "music",
    "darkness", "cloud", "ocean", "window", "letter", "prayer", "hatred",
    "mother", "father", "sister", "brother",
]
NOUN_PL = [
    "rivers", "flowers", "shadows", "voices", "dreams", "leaves", "birds",
    "children", "waters", "mountains", "stars", "roses", "winds", "bells",
    "candles", "ships", "fields", "ghosts", "sparrows", "lilies", "clouds",
    "willows", "swallows", "echoes", "pilgrims", "sailors", "women", "men",
]
V_PL = [
    "wander", "linger", "tremble", "whisper", "gather", "glimmer", "sleep",
    "dance", "fade", "rise", "fall", "sing", "drift", "wait", "weep",
    "shine", "burn", "dwell", "murmur", "sigh", "call", "turn", "climb",
]
V_3S = [
    "wanders", "lingers", "shivers", "whispers", "gathers", "glimmers",
    "sleeps", "dances", "fades", "rises", "sings", "drifts", "waits",
    "weeps", "shines", "burns", "dwells", "murmurs", "sighs", "calls",
    "turns", "climbs", "falls",
]
V_PAST = [
    "heard", "saw", "found", "kept", "lost", "loved", "hated", "watched",
    "carried", "followed", "remembered", "gathered", "touched", "answered",
    "praised", "buried", "left", "sought", "knew", "met", "blessed",
]
V_PAST_INTR = [
    "wandered", "lingered", "trembled", "waited", "slept", "danced",
    "faded", "wept", "drifted", "dwelled", "sighed", "turned", "climbed",
    "prayed", "rested", "dreamed",
]
V_ING = [
    "wandering", "dreaming", "sleeping", "singing", "waiting", "burning",
    "trembling", "drifting", "weeping", "shining", "fading", "listening",
    "resting", "turning", "whispering", "falling",
]
ADV = [
    "softly", "slowly", "gently", "quietly", "sweetly", "lightly", "always",
    "never", "ever", "sadly", "bravely", "dimly", "faintly", "swiftly",
]
PREP = [
    "in", "on", "by", "upon", "beneath", "across", "over", "through",
    "beyond", "near", "along", "toward", "under", "into",
]
SUBJ = ["I", "we", "she", "he", "they"]

# Every line ends on a rhyme noun; the slot names map to the lists above.
TEMPLATES = [
    "The {adj} {noun} {v3s} {prep} the {end}",
    "And {npl} {vpl} {adv} {prep} the {end}",
    "I {vpast} the {adj} {noun} {prep} the {end}",
    "My {noun} is {ving} {prep} the {end}",
    "Where {adj} {npl} {vpl} {prep} the {end}",
    "{Adv} the {npl} {vpl} {prep} the {adj} {end}",
    "We {vpasti} {prep} the {adj} {end}",
    "And all the {npl} of the {adj} {end}",
    "The {noun} of {noun} {v3s} {prep} the {end}",
    "Then {subj} {vpasti} {adv} {prep} the {end}",
    "How {adj} the {noun} {prep} the {end}",
    "{Subj} {vpast} the {noun} {prep} the {adj} {end}",
]

PUNCT = ["", "", "", ",", ",", ".", ";", "!"]

TITLES_A = ["Song", "Ode", "Lines", "Hymn", "Ballad", "Elegy", "Sonnet"]


def load_dict(path):
  pron = {}
  with open(path, encoding="utf-8") as f:
    for line in f:
      line = line.split("#")[0].strip()
      if not line:
        continue
      parts = line.split()
      word = parts[0]
      if "(" in word:
        continue
      pron[word] = parts[1:]
  return pron


def rhyme_suffix(phones):
  last = None
  for i, p in enumerate(phones):
    if p[-1] == "1":
      last = i
  return " ".join(phones[last:])


def check_vocab(pron):
  for family, words in RHYMES.items():
    keys = {rhyme_suffix(pron[w]) for w in words}
    if len(keys) != 1:
      raise SystemExit(f"rhyme family {family} is not a perfect family: {keys}")
  for lst in (ADJ, NOUN, NOUN_PL, V_PL, V_3S, V_PAST, V_PAST_INTR, V_ING,
              ADV, PREP):
    for w in lst:
      if w.lower() not in pron:
        raise SystemExit(f"missing from dictionary: {w}")


def poet_style(rng):
  return {
      "templates": rng.sample(range(len(TEMPLATES)), 8),
      "rhymes": rng.sample(sorted(RHYMES), 11),
      "adj": rng.sample(ADJ, 24),
      "noun": rng.sample(NOUN, 24),
      "npl": rng.sample(NOUN_PL, 18),
      "vpl": rng.sample(V_PL, 14),
      "v3s": rng.sample(V_3S, 14),
      "vpast": rng.sample(V_PAST, 13),
      "vpasti": rng.sample(V_PAST_INTR, 10),
      "ving": rng.sample(V_ING, 10),
      "adv": rng.sample(ADV, 9),
      "prep": rng.sample(PREP, 9),
  }


def make_line(rng, style, end):
  template = TEMPLATES[rng.choice(style["templates"])]
  fields = {
      "end": end,
      "adj": rng.choice(style["adj"]),
      "noun": rng.choice(style["noun"]),
      "npl": rng.choice(style["npl"]),
      "vpl": rng.choice(style["vpl"]),
      "v3s": rng.choice(style["v3s"]),
      "vpast": rng.choice(style["vpast"]),
      "vpasti": rng.choice(style["vpasti"]),
      "ving": rng.choice(style["ving"]),
      "adv": rng.choice(style["adv"]),
      "prep": rng.choice(style["prep"]),
      "subj": rng.choice(SUBJ[1:]),
  }
  fields["Adv"] = fields["adv"].capitalize()
  fields["Subj"] = rng.choice(SUBJ).capitalize()
  # str.format would choke on a repeated slot drawing the same word twice;
  # fill repeated {noun} slots independently.
  out = template
  while "{noun}" in out:
    out = out.replace("{noun}", rng.choice(style["noun"]), 1)
  line = out.format(**fields)
  line = line[0].upper() + line[1:]
  return line


def make_quatrain(rng, style, seen):
  fam_a, fam_b = rng.sample(style["rhymes"], 2)
  a1, a2 = rng.sample(RHYMES[fam_a], 2)
  b1, b2 = rng.sample(RHYMES[fam_b], 2)
  lines = []
  for end in (a1, b1, a2, b2):
    for _ in range(100):
      line = make_line(rng, style, end)
      if line.lower() not in seen:
        break
    seen.add(line.lower())
    lines.append(line + rng.choice(PUNCT))
  lines[-1] = lines[-1].rstrip(",;") + ("." if not lines[-1][-1] in ".!" else "")
  return lines


def write_poetic(rng, out_dir, styles, poems_per_poet, seen):
  for poet in POETS:
    style = styles[poet]
    chunks = []
    for p in range(poems_per_poet):
      header = [f"#poet: {poet}"]
      if rng.random() < 0.6:
        header.append(f"#title: {rng.choice(TITLES_A)} {p + 1}")
      stanzas = []
      for _ in range(rng.choice([1, 2, 2, 3])):
        stanzas.append("\n".join(make_quatrain(rng, style, seen)))
      chunks.append("\n".join(header) + "\n" + "\n\n".join(stanzas))
    (out_dir / f"{poet}.txt").write_text("\n\n".join(chunks) + "\n",
                                         encoding="utf-8")


def write_eval_lines(rng, path, styles, count, seen):
  rows = []
  for i in range(count):
    poet = POETS[i % len(POETS)]
    style = styles[poet]
    fam = rng.choice(style["rhymes"])
    for _ in range(100):
      line = make_line(rng, style, rng.choice(RHYMES[fam]))
      if line.lower() not in seen:
        break
    seen.add(line.lower())
    rows.append(f"{poet}\t{line},")
  path.write_text("\n".join(rows) + "\n", encoding="utf-8")


COMMENT_TOPICS = {
    "bike": (["my new bike", "the old bike", "a road bike"],
             ["cycling", "wheels", "pedals", "the trail"]),
    "coffee": (["this coffee", "the espresso", "my morning coffee"],
               ["caffeine", "beans", "the cafe", "mugs"]),
    "garden": (["my garden", "the tomatoes", "our backyard"],
               ["soil", "seeds", "compost", "watering"]),
    "music": (["that new album", "the concert", "this song"],
              ["guitar", "the band", "lyrics", "the drummer"]),
    "weather": (["the storm", "this heat", "the rain today"],
                ["umbrellas", "forecast", "thunder", "the clouds"]),
    "cooking": (["this recipe", "the soup", "my bread"],
                ["flour", "the oven", "spices", "butter"]),
    "books": (["that novel", "the library", "this poem"],
              ["chapters", "the author", "reading", "pages"]),
    "travel": (["the trip", "our flight", "the train"],
               ["luggage", "tickets", "the airport", "maps"]),
    "pets": (["my dog", "the kitten", "our puppy"],
             ["leashes", "treats", "the vet", "walks"]),
    "games": (["that match", "the tournament", "this game"],
              ["the score", "players", "the coach", "goals"]),
}
COMMENT_OPENERS = [
    "I really love {s}", "Honestly {s} was awful", "Has anyone tried {s}",
    "I think {s} is great", "Does anyone else hate {s}",
    "Just finished with {s}", "Can not stop thinking about {s}",
]
REPLY_OPENERS = [
    "You should look into {r}", "Totally agree, {r} makes it better",
    "Depends on {r} honestly", "I never cared much for {r}",
    "Same here, {r} is the best part", "Try asking about {r}",
]


def write_comments(rng, path, pairs):
  chunks = ["#poet: comments"]
  topics = sorted(COMMENT_TOPICS)
  for _ in range(pairs):
    t = rng.choice(topics)
    subjects, replies = COMMENT_TOPICS[t]
    comment = rng.choice(COMMENT_OPENERS).format(s=rng.choice(subjects))
    reply = rng.choice(REPLY_OPENERS).format(r=rng.choice(replies))
    chunks.append(f"{comment}\n{reply}")
  path.write_text(chunks[0] + "\n" + "\n\n".join(chunks[1:]) + "\n",
                  encoding="utf-8")


def main():
  ap = argparse.ArgumentParser()
  ap.add_argument("--seed", type=int, default=1922)
  ap.add_argument("--poems-per-poet", type=int, default=18)
  ap.add_argument("--eval-lines", type=int, default=60)
  ap.add_argument("--comment-pairs", type=int, default=1500)
  args = ap.parse_args()

  pron = load_dict(ROOT / "data/phonology/cmudict.dict")
  check_vocab(pron)

  rng = random.Random(args.seed)
  seen = set()
  poetic = ROOT / "data/corpus/poetic"
  poetic.mkdir(parents=True, exist_ok=True)
  styles = {poet: poet_style(rng) for poet in POETS}
  write_poetic(rng, poetic, styles, args.poems_per_poet, seen)
  (ROOT / "data/eval").mkdir(exist_ok=True)
  write_eval_lines(rng, ROOT / "data/eval/first_lines.tsv", styles,
                   args.eval_lines, seen)
  comments = ROOT / "data/corpus/comments"
  comments.mkdir(parents=True, exist_ok=True)
  write_comments(rng, comments / "forum.txt", args.comment_pairs)


if __name__ == "__main__":
  main()

"""Synthetic benchmark generation and the five-way mode comparison.

The generator plants paraphrase families (stories), unique-topic factual
posts (noise), and templated reaction posts (chatter). Story posts within
a family share entity and event words under varying carriers and
decorations; chatter families are internally repetitive but carry no
assertion, so a run that skips the assertion filter wrongly clusters them.

Ground truth: every story post carries its story label; every noise and
chatter post is its own singleton. Scoring covers the full corpus, with
posts a mode dropped counted as predicted singletons.

The same grammars build the shipped training seeds, so the shipped
classifiers are consistent with the benchmark's geometry by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import assertion as assertion_mod
from . import paraphrase as paraphrase_mod
from . import pipeline as pipeline_mod
from . import simgraph
from .corpus import Corpus, Post
from .evalmetrics import ReportRow, score_hierarchy
from .linear_model import LinearModel
from .paraphrase import ParaphraseModel

# --- content pools -----------------------------------------------------------
# Each story topic: entity variants (sharing >= 1 word), event variants
# (sharing >= 1 word), optional detail phrases. Within-family pairs thus
# share >= 2-3 content words; cross-family pairs share only carriers.

STORY_TOPICS: tuple[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]], ...] = (
    (("harbor bridge", "the harbor bridge", "harbor bridge span"),
     ("has collapsed", "collapsed into the water", "partially collapsed"),
     ("near the boat dock", "on the east side", "this morning", "")),
    (("city hall", "the city hall building", "city hall annex"),
     ("is on fire", "caught fire", "on fire with smoke showing"),
     ("downtown", "right now", "witnesses say", "")),
    (("metro line four", "line four trains", "the line four service"),
     ("derailed", "derailed near the tunnel", "partially derailed"),
     ("no injuries reported", "rescue crews on scene", "")),
    (("water supply", "the city water supply", "municipal water supply"),
     ("is contaminated", "tested contaminated", "contaminated by runoff"),
     ("in the north district", "officials warn", "")),
    (("airport runway", "the main runway", "runway two"),
     ("is closed", "closed after inspection", "remains closed"),
     ("flights diverted", "until further notice", "")),
    (("power grid", "the power grid", "grid substations"),
     ("failed overnight", "failed across town", "has failed"),
     ("thousands without electricity", "crews working", "")),
    (("river levee", "the levee", "levee wall"),
     ("was breached", "breached overnight", "has been breached"),
     ("evacuations ordered", "on the south bank", "")),
    (("school district", "the school district", "district schools"),
     ("cancelled classes", "classes cancelled", "cancelled all classes"),
     ("for tomorrow", "due to the storm", "")),
    (("oil tanker", "a tanker ship", "the tanker"),
     ("ran aground", "aground on the shoals", "ran aground offshore"),
     ("crews responding", "spill feared", "")),
    (("stadium roof", "the stadium roof", "roof panels at the stadium"),
     ("tore open", "tore loose", "tore apart in the wind"),
     ("crowd moved out", "during the match", "")),
    (("the mayor", "mayor", "the mayors office"),
     ("resigned", "has resigned", "resigned this afternoon"),
     ("statement expected", "aides confirm", "")),
    (("courthouse", "the old courthouse", "courthouse steps"),
     ("was evacuated", "evacuated after a threat", "being evacuated"),
     ("bomb squad on site", "street cordoned off", "")),
    (("vaccine shipment", "the vaccine shipment", "a shipment of vaccine"),
     ("was stolen", "stolen from the depot", "reported stolen"),
     ("police investigating", "overnight", "")),
    (("grain silo", "the grain silo", "silo complex"),
     ("exploded", "exploded at dawn", "has exploded"),
     ("two workers hurt", "dust blast suspected", "")),
    (("ferry service", "the ferry", "ferry crossings"),
     ("suspended", "suspended until monday", "service suspended"),
     ("high winds", "port authority says", "")),
    (("museum vault", "the museum vault", "vault at the museum"),
     ("was robbed", "robbed overnight", "reported robbed"),
     ("three paintings missing", "alarm disabled", "")),
    (("reservoir dam", "the dam", "dam gates"),
     ("is leaking", "leaking at the base", "started leaking"),
     ("engineers inspecting", "downstream alert", "")),
    (("chemical plant", "the chemical plant", "plant on the east road"),
     ("released ammonia", "ammonia released", "released an ammonia cloud"),
     ("shelter in place", "wind shifting", "")),
    (("hospital generators", "the hospital generators", "generators at the hospital"),
     ("stalled briefly", "stalled twice", "stalled during the night"),
     ("backup restored", "no patients affected", "")),
    (("fishing fleet", "the fishing fleet", "fleet of trawlers"),
     ("returned early", "turned back early", "came back early"),
     ("storm offshore", "nets empty", "")),
    (("rail yard", "the rail yard", "yard sidings"),
     ("flooded", "flooded overnight", "completely flooded"),
     ("freight delayed", "pumps running", "")),
    (("observatory dome", "the observatory", "dome at the observatory"),
     ("jammed shut", "jammed again", "stuck jammed"),
     ("viewing cancelled", "motor burned out", "")),
    (("lighthouse lamp", "the lighthouse", "lamp at the lighthouse"),
     ("went dark", "dark since midnight", "went completely dark"),
     ("ships warned", "pilots notified by radio", "")),
    (("botanic garden", "the botanic garden", "garden conservatory"),
     ("lost the old oak", "old oak came down", "saw the old oak split"),
     ("storm damage", "paths closed", "")),
    (("quarry blast", "the quarry", "blast at the quarry"),
     ("cracked nearby walls", "cracked windows and walls", "left walls cracked"),
     ("residents complain", "survey ordered", "")),
    (("telecom exchange", "the telephone exchange", "exchange building"),
     ("cut off service", "service cut off", "cut off half the city"),
     ("repair crews dispatched", "lines down", "")),
    (("zoo enclosure", "the zoo", "enclosure at the zoo"),
     ("reopened", "reopened to visitors", "has reopened"),
     ("after repairs", "keepers pleased", "")),
    (("glass factory", "the glass factory", "factory furnace"),
     ("shut down", "shut down abruptly", "was shut down"),
     ("orders halted", "union meeting called", "")),
)

PREFIXES = ("", "", "", "", "BREAKING:", "Update:", "just in:", "confirmed:")
HANDLES = ("newsdesk", "localwire", "cityupdates", "scannerfeed")

NOISE_SUBJECTS = (
    "city council", "the library board", "park rangers", "the transit agency",
    "local growers", "the housing office", "harbor patrol", "the arts commission",
    "county surveyors", "the parking bureau", "street vendors", "the tax office",
    "youth leagues", "the records division", "night market traders",
    "the elections board", "bridge toll staff", "the permits desk",
    "community gardeners", "the sanitation crew", "river wardens",
    "the budget committee", "volunteer medics", "the zoning panel",
    "food bank staff", "the weather bureau", "marathon organizers",
    "the heritage trust", "bike couriers", "the ethics board",
)
NOISE_VERBS = (
    "approved", "postponed", "announced", "expanded", "reviewed",
    "audited", "rescheduled", "published", "endorsed", "finalized",
    "drafted", "unveiled", "extended", "ratified", "archived",
    "suspended consideration of", "tabled", "inventoried", "certified", "mapped",
)
NOISE_OBJECTS = (
    "the spring budget plan", "new bike lanes", "a recycling scheme",
    "the festival permits", "a tree census", "the shuttle timetable",
    "crosswalk repainting", "a mural program", "the drainage survey",
    "library late fees", "a composting pilot", "the pier renovation",
    "streetlight upgrades", "a noise ordinance", "the tutoring fund",
    "pothole repairs", "a heritage plaque", "the kayak launch",
    "vendor licensing", "a sister city visit", "the orchard lease",
    "bus shelter ads", "a census outreach", "the skating rink hours",
    "rooftop beehives",
)
NOISE_PLACES = (
    "for next spring", "in the west ward", "after public comment",
    "at the annual meeting", "pending funding", "across all districts",
    "starting next month", "for the waterfront", "near the old mill",
    "along the greenway", "behind schedule", "under the new charter",
    "with minor changes", "by unanimous vote", "for a trial year",
)

CHATTER_FAMILIES: tuple[tuple[str, ...], ...] = (
    ("is everyone ok ?", "is everybody ok ?", "everyone ok ??",
     "are you all ok ?", "is everyone okay ?", "everybody okay ??"),
    ("omg this is insane", "omg omg this is crazy", "omg i cant believe this",
     "this is absolutely insane omg", "cant believe whats happening omg"),
    ("praying for everyone out there", "praying for the whole city tonight",
     "thoughts and prayers for everyone", "praying so hard for everyone"),
    ("i hate reporters !", "i hate these reporters so much !",
     "reporters are the worst !", "ugh i hate the news reporters !"),
    ("so scared right now", "im so scared rn", "honestly terrified right now",
     "never been this scared", "so so scared rn"),
    ("what is even going on ?", "does anyone know whats going on ?",
     "what the heck is going on ??", "anyone else confused whats going on ?"),
    ("my heart goes out to the families", "heart goes out to everyone affected",
     "my heart is with the families tonight", "heart goes out to all of them"),
    ("cant stop crying", "i cant stop crying rn", "literally crying right now",
     "been crying all night", "crying again honestly"),
    ("stay safe out there everyone", "please stay safe tonight",
     "be careful and stay safe everyone", "stay safe people !"),
    ("why does this keep happening ?", "why why why does this happen ?",
     "how does this keep happening ??", "why does it always happen here ?"),
    ("feeling so helpless rn", "i feel completely helpless",
     "feeling helpless watching this", "so helpless right now"),
    ("this city never sleeps huh", "love this city so much",
     "this city is something else", "what a city honestly"),
    ("need a coffee after today", "today calls for extra coffee",
     "coffee barely helping today", "running on coffee today"),
    ("when is the game back on ?", "anyone know when the game restarts ?",
     "so when does the game start again ??", "is the game still happening ?"),
)

CHATTER_TAILS = ("", "", "", " rn", " tonight", " honestly")

# Reaction frames around one entity: two reactions to the same event are
# loose paraphrases (small word overlap, long distinct carriers), the
# geometry of the canonical amber-alert pair.
LOOSE_FRAMES = (
    "{e} just gave me a damn heart attack",
    "that {e} scared the crap out of me",
    "this {e} woke up the entire street",
    "my phone wont shut up about the {e}",
    "everyone at work is talking about the {e}",
    "so that {e} was absolutely terrifying",
    "the {e} completely ruined my morning",
    "still shaking from that {e} tbh",
    "am i the only one who didnt get that {e}",
    "why is my feed all about the {e} now",
    "ok who else got woken up by the {e}",
    "the {e} again ? i was up at 5 am",
    "not me crying over the {e} on the bus",
    "do we even know if the {e} is real",
)


@dataclass(frozen=True)
class BenchmarkData:
    corpus: Corpus
    truth: dict[str, str]   # post id -> ground-truth label
    kinds: dict[str, str]   # post id -> story | noise | chatter


def _join(*parts: str) -> str:
    return " ".join(p for p in parts if p)


def _story_text(rng: np.random.Generator, topic_idx: int) -> str:
    entities, events, details = STORY_TOPICS[topic_idx]
    entity = entities[int(rng.integers(len(entities)))]
    event = events[int(rng.integers(len(events)))]
    detail = details[int(rng.integers(len(details)))]
    prefix = PREFIXES[int(rng.integers(len(PREFIXES)))]
    text = _join(prefix, entity, event, detail)
    deco = int(rng.integers(10))
    if deco == 0:
        text = _join(text, f"http://short.ln/{int(rng.integers(100, 1000))}")
    elif deco == 1:
        text = _join(text, f"#{entities[0].split()[-1]}")
    elif deco == 2:
        text = _join(f"RT @{HANDLES[int(rng.integers(len(HANDLES)))]}:", text)
    return text


def _noise_text(rng: np.random.Generator, sv_index: int) -> str:
    s = NOISE_SUBJECTS[sv_index // len(NOISE_VERBS)]
    v = NOISE_VERBS[sv_index % len(NOISE_VERBS)]
    o = NOISE_OBJECTS[int(rng.integers(len(NOISE_OBJECTS)))]
    p = NOISE_PLACES[int(rng.integers(len(NOISE_PLACES)))]
    return _join(s, v, o, p)


def _chatter_text(rng: np.random.Generator) -> str:
    fam = CHATTER_FAMILIES[int(rng.integers(len(CHATTER_FAMILIES)))]
    text = fam[int(rng.integers(len(fam)))]
    tail = CHATTER_TAILS[int(rng.integers(len(CHATTER_TAILS)))]
    return text + tail


def generate_benchmark(
    n_stories: int = 21,
    tweets_per_story: int | tuple[int, int] = 30,
    noise_count: int = 600,
    chatter_count: int = 600,
    seed: int = 0,
) -> BenchmarkData:
    """Deterministic labeled corpus: exactly the requested counts, shuffled
    together, ids assigned in final order."""
    if n_stories < 1:
        raise ValueError("need at least one story")
    if n_stories > len(STORY_TOPICS):
        raise ValueError(f"at most {len(STORY_TOPICS)} story topics available")
    max_noise = len(NOISE_SUBJECTS) * len(NOISE_VERBS)
    if noise_count > max_noise:
        raise ValueError(f"at most {max_noise} distinct noise posts available")
    lo, hi = (
        (tweets_per_story, tweets_per_story)
        if isinstance(tweets_per_story, int)
        else tweets_per_story
    )
    if not 1 <= lo <= hi:
        raise ValueError("tweets_per_story range must satisfy 1 <= lo <= hi")
    rng = np.random.default_rng(seed)
    topic_order = rng.permutation(len(STORY_TOPICS))[:n_stories]
    rows: list[tuple[str, str, str]] = []  # (text, label, kind)
    for s in range(n_stories):
        count = int(rng.integers(lo, hi + 1))
        for _ in range(count):
            rows.append((_story_text(rng, int(topic_order[s])), f"story-{s:02d}", "story"))
    sv_order = rng.permutation(max_noise)[:noise_count]
    for i in range(noise_count):
        rows.append((_noise_text(rng, int(sv_order[i])), f"noise-{i:04d}", "noise"))
    for i in range(chatter_count):
        rows.append((_chatter_text(rng), f"chatter-{i:04d}", "chatter"))
    order = rng.permutation(len(rows))
    posts = []
    truth: dict[str, str] = {}
    kinds: dict[str, str] = {}
    for new_idx, old_idx in enumerate(order):
        text, label, kind = rows[int(old_idx)]
        pid = f"t{new_idx:05d}"
        posts.append(Post(id=pid, text=text, created_at=float(new_idx)))
        truth[pid] = label
        kinds[pid] = kind
    return BenchmarkData(
        corpus=Corpus(posts=posts, source_uri=f"bench:seed={seed}"),
        truth=truth,
        kinds=kinds,
    )


def write_benchmark(data: BenchmarkData, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.jsonl"
    truth_path = out / "truth.tsv"
    import json

    lines = []
    for p in data.corpus:
        lines.append(json.dumps(
            {"id": p.id, "text": p.text, "created_at": p.created_at},
            ensure_ascii=False, sort_keys=True,
        ))
    corpus_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    rows = ["id\tlabel\tkind"]
    for p in data.corpus:
        rows.append(f"{p.id}\t{data.truth[p.id]}\t{data.kinds[p.id]}")
    truth_path.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    return corpus_path, truth_path


def load_truth(path: str | Path) -> dict[str, str]:
    truth: dict[str, str] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"bad truth line: {line!r}")
        truth[parts[0]] = parts[1]
    return truth


# --- shipped training seeds --------------------------------------------------

def build_assertion_seed(seed: int = 2024) -> list[tuple[str, str]]:
    """Labeled texts for the assertion classifier, balanced roughly 1:1.

    Assertions sample the story and noise grammars; the other class
    samples the chatter grammar. Two canonical hand-picked examples are
    pinned on top of the generated ones.
    """
    rng = np.random.default_rng(seed)
    rows: list[tuple[str, str]] = [
        ("there is a third bomber on the roof", "assertion"),
        ("I hate reporters!", "other"),
    ]
    for topic in range(len(STORY_TOPICS)):
        for _ in range(2):
            rows.append((_story_text(rng, topic), "assertion"))
    sv = rng.permutation(len(NOISE_SUBJECTS) * len(NOISE_VERBS))[:42]
    for idx in sv:
        rows.append((_noise_text(rng, int(idx)), "assertion"))
    for _ in range(97):
        rows.append((_chatter_text(rng), "other"))
    return rows


def build_paraphrase_seed(seed: int = 4096) -> list[str]:
    """Tab-separated pair rows in the annotated-corpus layout:
    topic_id, topic_name, sent1, sent2, (yes, no) votes, then two filler
    columns. Positives pair posts within one story family; negatives pair
    across families plus the hard cases (shared subject or verb, shared
    decorations). A handful of debatable (2,3) rows exercise the drop
    rule. Two canonical pairs are pinned first.
    """
    rng = np.random.default_rng(seed)
    rows: list[str] = []

    def emit(topic_id: int, name: str, s1: str, s2: str, votes: str):
        rows.append("\t".join(
            [str(topic_id), name, s1, s2, votes, "x", "x"]
        ))

    emit(900, "amber",
         "Amber alert gave me a damn heart attack",
         "That Amber Alert scared the crap out of me", "(4, 1)")
    emit(900, "amber",
         "My phone is annoying me with these amber alert",
         "Am I the only one who dont get Amber alert", "(1, 4)")

    pos_votes = ("(3, 2)", "(4, 1)", "(5, 0)")
    neg_votes = ("(0, 5)", "(1, 4)")
    # positives: pairs inside one family
    for topic in range(len(STORY_TOPICS)):
        variants = [_story_text(rng, topic) for _ in range(8)]
        for _ in range(14):
            a, b = rng.choice(len(variants), size=2, replace=False)
            emit(topic, STORY_TOPICS[topic][0][0].split()[-1],
                 variants[int(a)], variants[int(b)],
                 pos_votes[int(rng.integers(len(pos_votes)))])
    # loose positives: one entity under two reaction frames; resample until
    # the pair shares at least three words so it cannot collide with the
    # two-shared-words negative band
    from . import textkit as _tk
    from .paraphrase import pair_features as _pf

    def _frame_entity(topic: int) -> str:
        e = STORY_TOPICS[topic][0][0]
        return e[4:] if e.startswith("the ") else e

    for topic in range(len(STORY_TOPICS)):
        entity = _frame_entity(topic)
        made = 0
        while made < 8:
            fa, fb = rng.choice(len(LOOSE_FRAMES), size=2, replace=False)
            s1 = LOOSE_FRAMES[int(fa)].format(e=entity)
            s2 = LOOSE_FRAMES[int(fb)].format(e=entity)
            feats = _pf(_tk.token_sets(s1), _tk.token_sets(s2))
            if feats.i_w1 < 3:
                continue
            emit(topic, STORY_TOPICS[topic][0][0].split()[-1], s1, s2,
                 pos_votes[int(rng.integers(len(pos_votes)))])
            made += 1
    # negatives: across families
    for _ in range(360):
        ta, tb = rng.choice(len(STORY_TOPICS), size=2, replace=False)
        emit(500, "cross",
             _story_text(rng, int(ta)), _story_text(rng, int(tb)),
             neg_votes[int(rng.integers(len(neg_votes)))])
    # loose negatives: two entities under two reaction frames; the carrier
    # words look alike but at most two words are shared, the mirror image
    # of the loose-positive band
    made = 0
    while made < 300:
        ta, tb = rng.choice(len(STORY_TOPICS), size=2, replace=False)
        fa, fb = rng.choice(len(LOOSE_FRAMES), size=2, replace=False)
        s1 = LOOSE_FRAMES[int(fa)].format(e=_frame_entity(int(ta)))
        s2 = LOOSE_FRAMES[int(fb)].format(e=_frame_entity(int(tb)))
        feats = _pf(_tk.token_sets(s1), _tk.token_sets(s2))
        if feats.i_w1 > 2:
            continue
        emit(501, "loosecross", s1, s2,
             neg_votes[int(rng.integers(len(neg_votes)))])
        made += 1
    # hardest negatives: one entity, frames sharing no further word. Shared
    # chars stay high (the entity) while shared words stay at two, so word
    # overlap, not entity chars, has to carry the judgement
    made = 0
    while made < 150:
        topic = int(rng.integers(len(STORY_TOPICS)))
        entity = _frame_entity(topic)
        fa, fb = rng.choice(len(LOOSE_FRAMES), size=2, replace=False)
        s1 = LOOSE_FRAMES[int(fa)].format(e=entity)
        s2 = LOOSE_FRAMES[int(fb)].format(e=entity)
        feats = _pf(_tk.token_sets(s1), _tk.token_sets(s2))
        if feats.i_w1 != 2:
            continue
        emit(502, "looseentity", s1, s2, "(1, 4)")
        made += 1
    # hard negatives: noise posts sharing subject or verb
    n_verbs = len(NOISE_VERBS)
    for _ in range(120):
        s = int(rng.integers(len(NOISE_SUBJECTS)))
        v1, v2 = rng.choice(n_verbs, size=2, replace=False)
        emit(600, "noise",
             _noise_text(rng, s * n_verbs + int(v1)),
             _noise_text(rng, s * n_verbs + int(v2)),
             neg_votes[int(rng.integers(len(neg_votes)))])
    for _ in range(120):
        v = int(rng.integers(n_verbs))
        s1, s2 = rng.choice(len(NOISE_SUBJECTS), size=2, replace=False)
        emit(601, "noise",
             _noise_text(rng, int(s1) * n_verbs + v),
             _noise_text(rng, int(s2) * n_verbs + v),
             neg_votes[int(rng.integers(len(neg_votes)))])
    # story vs noise negatives
    for _ in range(80):
        t = int(rng.integers(len(STORY_TOPICS)))
        sv = int(rng.integers(len(NOISE_SUBJECTS) * n_verbs))
        emit(700, "mixed", _story_text(rng, t), _noise_text(rng, sv),
             neg_votes[int(rng.integers(len(neg_votes)))])
    # debatable rows: dropped by the loader
    for _ in range(20):
        ta, tb = rng.choice(len(STORY_TOPICS), size=2, replace=False)
        emit(800, "debatable",
             _story_text(rng, int(ta)), _story_text(rng, int(tb)), "(2, 3)")
    return rows


def seed_assertion_path() -> Path:
    return Path(str(resources.files("storygraph").joinpath("data/assertion_seed.jsonl")))


def seed_paraphrase_path() -> Path:
    return Path(str(resources.files("storygraph").joinpath("data/paraphrase_seed.tsv")))


def write_seed_files(data_dir: str | Path):
    import json

    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    lines = [
        json.dumps({"text": t, "label": lab}, ensure_ascii=False, sort_keys=True)
        for t, lab in build_assertion_seed()
    ]
    (data_dir / "assertion_seed.jsonl").write_text(
        "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
    )
    (data_dir / "paraphrase_seed.tsv").write_text(
        "\n".join(build_paraphrase_seed()) + "\n", encoding="utf-8", newline="\n"
    )


def train_seed_models(
    lam: float = 1e-3, epochs: int = 100, seed: int = 0
) -> tuple[tuple[LinearModel, object], ParaphraseModel]:
    """Train both classifiers from the shipped seed files.

    The defaults run the optimizer long enough to converge on the seed
    sets; quick-and-dirty settings cost boundary sharpness.
    """
    labeled = assertion_mod.load_labeled_texts(seed_assertion_path())
    a_model, a_feat = assertion_mod.train_assertion_model(
        labeled, lam=lam, epochs=epochs, seed=seed
    )
    pairs, _warn = paraphrase_mod.load_tpc(seed_paraphrase_path())
    p_model = paraphrase_mod.train_paraphrase(
        pairs, lam=lam, epochs=epochs, seed=seed
    )
    return (a_model, a_feat), p_model


# --- mode comparison ---------------------------------------------------------

def compare_modes(
    data: BenchmarkData,
    assertion_model: tuple,
    paraphrase_model: ParaphraseModel,
    modes: tuple[str, ...] = ("control", "hac", "ad_hac", "louvain", "ad_louvain"),
    k: int = 21,
    louvain_seed: int = 0,
    pairing: str = "all",
) -> dict[str, ReportRow]:
    """Run each requested mode in memory over the benchmark corpus and
    score it against truth at a k-cluster cut.

    The paraphrase graph is built once over the full corpus; the
    assertion-filtered variant reuses it as an induced subgraph, which is
    identical to rebuilding because pair margins depend only on the model.
    """
    a_model, a_feat = assertion_model
    corpus = data.corpus
    kept_corpus = None
    if any(m.startswith("ad_") for m in modes):
        kept_corpus, _ = assertion_mod.filter_assertions(a_model, a_feat, corpus)
    full_graph = None
    if "louvain" in modes or "ad_louvain" in modes:
        pair_mode = pipeline_mod.resolve_pairing(pairing, len(corpus))
        full_graph = simgraph.build_graph(corpus, paraphrase_model, mode=pair_mode)
    results: dict[str, ReportRow] = {}
    for mode in modes:
        posts = list(kept_corpus) if mode.startswith("ad_") else list(corpus)
        prebuilt = None
        if mode == "louvain":
            prebuilt = full_graph
        elif mode == "ad_louvain":
            keep_ids = {p.id for p in posts}
            keep_idx = [i for i, nid in enumerate(full_graph.node_ids) if nid in keep_ids]
            prebuilt = simgraph.induced_subgraph(full_graph, keep_idx)
        hierarchy, _g = pipeline_mod.cluster_posts(
            posts, mode, paraphrase_model,
            pairing=pairing, louvain_seed=louvain_seed, eval_k=k,
            prebuilt_graph=prebuilt,
        )
        # the control arm is, by definition, one cluster; cutting it to k
        # would invent structure the mode never produced
        row = score_hierarchy(data.truth, hierarchy, 1 if mode == "control" else k)
        results[mode] = ReportRow(mode, row.k, row.n_clusters, row.covered,
                                  row.ari, row.ami)
    return results

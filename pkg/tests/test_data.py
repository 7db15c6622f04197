import io
import random

import pytest

from retdecide.data import (
    format_run,
    parse_collection,
    parse_queries,
    parse_qrels,
    parse_run,
)
from retdecide.errors import ParseError


def run_stream(text: str) -> io.StringIO:
    return io.StringIO(text)


class TestParseRun:
    def test_single_line(self):
        run = parse_run(run_stream("1 Q0 d7 1 12.5 tas\n"))
        assert run.system_id == "tas"
        assert run.entries == {"1": [("d7", 12.5)]}

    def test_resorted_by_score(self):
        run = parse_run(run_stream("1 Q0 dA 1 3.0 r\n1 Q0 dB 2 5.0 r\n"))
        assert run.ranking("1") == ["dB", "dA"]

    def test_rank_column_ignored(self):
        # identical scores ordered by doc_id regardless of claimed ranks
        run = parse_run(run_stream("1 Q0 z 1 2.0 r\n1 Q0 a 2 2.0 r\n"))
        assert run.ranking("1") == ["a", "z"]

    def test_shuffled_ranks_match_sort_oracle(self):
        rng = random.Random(42)
        lines = []
        expected = {}
        for qid in range(20):
            docs = [(f"d{i}", round(rng.uniform(0, 10), 3)) for i in range(50)]
            order = list(range(50))
            rng.shuffle(order)
            for fake_rank, i in enumerate(order):
                doc, score = docs[i]
                lines.append(f"{qid} Q0 {doc} {fake_rank} {score} tag")
            expected[str(qid)] = [d for d, _s in sorted(docs, key=lambda e: (-e[1], e[0]))]
        rng.shuffle(lines)
        run = parse_run(run_stream("\n".join(lines) + "\n"))
        for qid, docs in expected.items():
            assert run.ranking(qid) == docs

    def test_order_insensitive(self):
        lines = ["1 Q0 d1 1 3.0 r", "1 Q0 d2 2 2.0 r", "2 Q0 d9 1 9.9 r"]
        a = parse_run(run_stream("\n".join(lines)))
        b = parse_run(run_stream("\n".join(reversed(lines))))
        assert a == b

    def test_round_trip(self):
        text = "1 Q0 d1 1 3.25 sys\n1 Q0 d2 2 -1.5 sys\n2 Q0 d9 1 0.125 sys\n"
        run = parse_run(run_stream(text))
        assert parse_run(run_stream(format_run(run))) == run

    def test_malformed_field_count(self):
        with pytest.raises(ParseError, match=":1:"):
            parse_run(run_stream("1 Q0 d1 1 3.0\n"))

    def test_non_numeric_score_reports_line(self):
        with pytest.raises(ParseError, match=":2:"):
            parse_run(run_stream("1 Q0 d1 1 3.0 r\n1 Q0 d2 2 oops r\n"))

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_run(run_stream("1 Q0 d1 1 3.0 r\n1 Q0 d1 2 2.0 r\n"))


class TestParseQrels:
    def test_basic(self):
        qrels = parse_qrels(run_stream("5 0 d1 2\n"))
        assert qrels.judgments == {("5", "d1"): 2}
        assert qrels.scale == "graded"

    def test_binary_inference(self):
        qrels = parse_qrels(run_stream("1 0 d1 1\n1 0 d2 0\n"))
        assert qrels.scale == "binary"
        assert qrels.max_grade == 1

    def test_duplicate_identical_lines_dedup(self):
        lines = ["1 0 d1 2", "2 0 d4 1", "1 0 d1 2"] * 5 + [f"3 0 e{i} 1" for i in range(35)]
        qrels = parse_qrels(run_stream("\n".join(lines)))
        # oracle: distinct (qid, doc) pairs in the raw lines
        expected = {tuple(line.split()[i] for i in (0, 2)) for line in lines}
        assert set(qrels.judgments) == expected

    def test_conflicting_duplicate_rejected(self):
        with pytest.raises(ParseError, match="conflicting"):
            parse_qrels(run_stream("1 0 d1 2\n1 0 d1 1\n"))

    def test_negative_grade_rejected(self):
        with pytest.raises(ParseError, match="negative"):
            parse_qrels(run_stream("1 0 d1 -1\n"))

    def test_scale_override_validated(self):
        with pytest.raises(ParseError, match="binary scale"):
            parse_qrels(run_stream("1 0 d1 3\n"), scale="binary")
        qrels = parse_qrels(run_stream("1 0 d1 1\n"), scale="graded")
        assert qrels.scale == "graded"


class TestParseQueries:
    def test_basic(self):
        qs = parse_queries(run_stream("3\twhat is bm25\n"))
        assert qs.queries["3"].tokens == ("what", "is", "bm25")

    def test_unicode(self):
        qs = parse_queries(run_stream("4\tDéjà-vu?\n"))
        assert qs.queries["4"].tokens == ("déjà", "vu")

    def test_missing_tab(self):
        with pytest.raises(ParseError, match="TAB"):
            parse_queries(run_stream("3 what is bm25\n"))

    def test_duplicate_qid(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_queries(run_stream("3\ta\n3\tb\n"))

    def test_empty_text_rejected(self):
        with pytest.raises(ParseError, match="empty text"):
            parse_queries(run_stream("3\t   \n"))

    def test_token_lengths_match_retokenization_oracle(self):
        rng = random.Random(7)
        words = [f"w{i}" for i in range(60)]
        lines = []
        for qid in range(2000):
            text = " ".join(rng.choice(words) for _ in range(rng.randint(1, 12)))
            lines.append(f"q{qid}\t{text}")
        qs = parse_queries(run_stream("\n".join(lines)))
        for line in lines:
            qid, text = line.split("\t", 1)
            assert len(qs.queries[qid].tokens) == len(text.split())


class TestParseCollection:
    def test_term_stats(self):
        coll = parse_collection(run_stream("d1\ta b\nd2\tb b c\n"))
        assert coll.term_stats["b"].collection_frequency == 3
        assert coll.term_stats["b"].document_frequency == 2
        assert coll.term_stats["a"].collection_frequency == 1

    def test_empty_stream(self):
        coll = parse_collection(run_stream(""))
        assert coll.docs == {}
        assert coll.term_stats == {}

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_collection(run_stream("d1\ta\nd1\tb\n"))

    def test_stats_match_recount_oracle(self):
        rng = random.Random(17)
        vocab = [f"t{i}" for i in range(200)]
        docs = {}
        lines = []
        for i in range(1000):
            tokens = [rng.choice(vocab) for _ in range(rng.randint(1, 30))]
            docs[f"d{i}"] = tokens
            lines.append(f"d{i}\t{' '.join(tokens)}")
        coll = parse_collection(run_stream("\n".join(lines)))
        # brute-force recount
        cf = {}
        df = {}
        for tokens in docs.values():
            for t in tokens:
                cf[t] = cf.get(t, 0) + 1
            for t in set(tokens):
                df[t] = df.get(t, 0) + 1
        assert {t: s.collection_frequency for t, s in coll.term_stats.items()} == cf
        assert {t: s.document_frequency for t, s in coll.term_stats.items()} == df
        assert all(s.document_frequency <= len(docs) for s in coll.term_stats.values())

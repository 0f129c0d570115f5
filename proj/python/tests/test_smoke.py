import re

import pytest

import hrdc


def test_gap_roundtrip():
    assert hrdc.to_gaps([3, 7, 8]) == [3, 4, 1]
    assert hrdc.from_gaps([3, 4, 1]) == [3, 7, 8]
    with pytest.raises(hrdc.Error):
        hrdc.to_gaps([4, 4])


def test_vbyte_layout():
    assert hrdc.encode([128], hrdc.Codec.Vbyte) == bytes([0x00, 0x81])
    assert hrdc.decode(bytes([0x81]), hrdc.Codec.Vbyte, 1) == [1]


@pytest.mark.parametrize("codec", list(hrdc.Codec.__members__.values()))
def test_streams(codec):
    gaps = [5, 1, 1, 1, 1, 2, 300, 1, 1, 17]
    assert hrdc.decode_stream(hrdc.encode_stream(gaps, codec)) == gaps


@pytest.fixture(scope="module")
def corpus():
    return hrdc.gen_corpus(seed=7, base_docs=3, versions=6, tokens=300, vocab_size=500)


def docs_of(text, starts):
    bounds = list(starts) + [len(text)]
    return [re.findall(rb"[A-Za-z0-9]+", text[a:b]) for a, b in zip(bounds, bounds[1:])]


@pytest.mark.parametrize("method", ["Vbyte", "Rice-Runs", "RePair-Skip-CM", "Vbyte-Lzend"])
def test_document_queries(corpus, method):
    text, starts = corpus
    ix = hrdc.Index.build(text, starts, hrdc.Scenario.NonPositional, method)
    docs = docs_of(text, starts)
    w1, w2 = docs[0][0], docs[0][3]
    want = [d + 1 for d, words in enumerate(docs) if w1 in words and w2 in words]
    assert ix.documents(f"{w1.decode()} {w2.decode()}") == want
    assert ix.documents("nosuchword") == []


def test_phrase_and_extract(corpus):
    text, starts = corpus
    ix = hrdc.Index.build(text, starts, hrdc.Scenario.Positional, "RePair", sample_ct=8)
    docs = docs_of(text, starts)
    phrase = docs[1][4:6]
    want = [
        (d, i)
        for d, words in enumerate(docs)
        for i in range(len(words) - 1)
        if words[i : i + 2] == phrase
    ]
    assert ix.phrase(b" ".join(phrase).decode()) == want
    assert ix.extract(10, 90) == text[10:90]


def test_text_store_sampling(corpus):
    text, _ = corpus
    ts = hrdc.TextStore.compress(text, 1)
    sizes = [ts.resampled(ct).serialized_size() for ct in (1, 8, 64)]
    assert sizes[0] > sizes[1] > sizes[2]
    assert ts.resampled(64).extract(100, 200) == text[100:200]


def test_save_load(tmp_path, corpus):
    text, starts = corpus
    ix = hrdc.Index.build(text, starts, hrdc.Scenario.NonPositional, "Vbyte-CM", {"k": "4"})
    sizes = ix.save(str(tmp_path))
    assert "postings.bin" in sizes
    back = hrdc.Index.load(str(tmp_path))
    assert back.method == ix.method
    assert back.documents("a") == ix.documents("a")

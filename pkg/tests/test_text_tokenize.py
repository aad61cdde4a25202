from polyfuse.text.tokenize import ZWNJ, tokenize


def test_empty_text():
    assert tokenize("") == []


def test_punctuation_stripped_and_latin_lowercased():
    assert tokenize("good movie!") == ["good", "movie"]
    assert tokenize("GOOD, Movie?!") == ["good", "movie"]


def test_persian_three_words():
    # "the movie was good"
    assert tokenize("فیلم خوب بود") == ["فیلم", "خوب", "بود"]


def test_zwnj_kept_inside_word():
    word = "می" + ZWNJ + "خواهم"  # one verb form joined by ZWNJ
    assert tokenize(f"من {word} برم") == ["من", word, "برم"]


def test_zwnj_stripped_at_token_edges():
    assert tokenize(ZWNJ + "خوب" + ZWNJ) == ["خوب"]
    assert tokenize(ZWNJ + " " + ZWNJ) == []


def test_arabic_script_untouched_by_lowercasing():
    text = "فیلم Good بود"
    assert tokenize(text) == ["فیلم", "good", "بود"]


def test_digits_are_tokens():
    assert tokenize("episode 12 was ok") == ["episode", "12", "was", "ok"]


def test_persian_diacritics_stay_attached():
    # combining marks (fatha etc.) must not split a token
    word = "كتاًب"
    assert tokenize(word) == [word]


def test_mixed_punctuation_separators():
    assert tokenize("خوب،بد؛عالی") == ["خوب", "بد", "عالی"]

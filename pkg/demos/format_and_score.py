"""Split a paragraph, render every task format, score some predictions.

Everything here is pure library code: the rule-protected sentence
splitter, the four text-to-text renderings a training set is built from,
and the evaluation metrics. No backend, no network.

Run with: python3 demos/format_and_score.py
"""

from trqg import (
    AnswerSpan,
    QaRecord,
    bleu_n,
    format_answer_extraction,
    format_qa,
    format_qg,
    find_covering_sentence,
    rouge_l,
    split_sentences,
    token_f1,
)

# "Dr." and "yy." would split a naive period-based splitter.
PARAGRAPH = (
    "Dr. Ahmet Yılmaz 1998 yılında Ankara'ya taşındı. "
    "Şehir 13. yy. eserleriyle tanınır. "
    "Kendisi burada on yıl çalıştı."
)

RECORD = QaRecord(
    id="demo-1",
    question="Ahmet Yılmaz hangi yıl Ankara'ya taşındı?",
    answers=[AnswerSpan(text="1998", answer_start=17)],
)


def show(sample) -> None:
    print(f"[{sample.task}]")
    print(f"  input:  {sample.input_text}")
    print(f"  target: {sample.target_text}")


def main() -> None:
    sentences = split_sentences(PARAGRAPH)
    print("sentences:")
    for span in sentences:
        print(f"  [{span.start:3d}, {span.end:3d}) {PARAGRAPH[span.start:span.end]!r}")
    print()

    show(format_qa(RECORD, PARAGRAPH))
    for qg_format in ("highlight", "prepend", "both"):
        show(format_qg(RECORD, PARAGRAPH, qg_format))
    covering = find_covering_sentence(sentences, RECORD.answers[0])
    show(format_answer_extraction(PARAGRAPH, covering, RECORD.answers, "demo-1-ae"))
    print()

    prediction = "1998 yılında"
    references = ["1998"]
    print(f"prediction {prediction!r} vs references {references}:")
    print(f"  exact-match F1: {token_f1(prediction, references):.4f}")

    candidates = ["Ahmet Yılmaz hangi yıl taşındı?"]
    refs = [RECORD.question]
    print(f"candidate {candidates[0]!r} vs reference {refs[0]!r}:")
    print(f"  BLEU-1:  {bleu_n(candidates, refs, 1):.4f}")
    print(f"  BLEU-2:  {bleu_n(candidates, refs, 2):.4f}")
    print(f"  ROUGE-L: {rouge_l(candidates, refs):.4f}")


if __name__ == "__main__":
    main()

"""Generate question-answer pairs offline with the mock backend.

Walks the full two-stage pipeline (answer extraction, then question
generation) against an in-process mock server, so nothing here needs a
model or a network connection. Fixtures script what the mock returns for
each prompt; anything unmatched falls through to the mock's echo
fallback, which is enough to see the plumbing end to end.

Run with: python3 demos/generate_offline.py
"""

from trqg import MockBackendServer, generate_qa_pairs, load_fixtures

CONTEXT = (
    "Pardus, TÜBİTAK tarafından geliştirilen bir işletim sistemidir. "
    "İlk sürümü 2005 yılında yayımlanmıştır."
)

# Extraction prompts wrap one sentence in <hl> markers; question prompts
# wrap the answer span instead. Match each on a distinctive fragment.
def contains(pattern: str, output: str) -> dict:
    return {"match": {"kind": "contains", "pattern": pattern}, "output": output}


FIXTURES = load_fixtures(
    [
        contains("<hl> Pardus, TÜBİTAK tarafından", "Pardus <sep> TÜBİTAK"),
        contains("<hl> İlk sürümü 2005", "2005"),
        contains("<hl> Pardus <hl>,", "TÜBİTAK hangi işletim sistemini geliştirmiştir?"),
        contains("Pardus, <hl> TÜBİTAK <hl>", "Pardus'u kim geliştirmiştir?"),
        contains("<hl> 2005 <hl>", "Pardus'un ilk sürümü hangi yıl yayımlanmıştır?"),
    ]
)


def main() -> None:
    with MockBackendServer(FIXTURES) as server:
        pairs, failures = generate_qa_pairs(
            CONTEXT, server.endpoint, key="pardus", qg_format="highlight"
        )

    for failure in failures:
        print(f"stage {failure.stage} failed: {failure.detail}")
    for pair in pairs:
        print(f"answer:   {pair.answer!r} at {pair.answer_start}")
        print(f"question: {pair.question}")
        print(f"backend:  {pair.provenance}")
        print()


if __name__ == "__main__":
    main()

"""Built-in choreographies used by ``choreotest demo`` and the test-suite."""

ATM = """\
C->A:withdraw ; A->B:authW ;
( B->A:deny ; A->C:bye
+ B->A:allow ; A->C:money )
"""

# the same interactions with the bank's choice turned into a fork
ATM_FORK = """\
C->A:withdraw ; A->B:authW ;
( B->A:deny ; A->C:bye
| B->A:allow ; A->C:money )
"""

ATM_FULL = """\
C->A:auth ; A->B:authReq ;
( B->A:denied ; A->C:authFail
+ B->A:granted ; A->C:granted ;
  ( C->A:withdraw ; A->B:authW ;
    ( B->A:deny ; A->C:bye + B->A:allow ; A->C:money )
  + C->A:quit ; A->B:quit
  + C->A:checkBalance ; A->B:getBalance ; B->A:balance ; A->C:balance
  )
)
"""

# C and D cannot learn which branch A took
UNAWARE_CHOICE = "A->B:m ; C->D:x + C->D:y"

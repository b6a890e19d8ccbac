"""Fixed vocabularies for the natural-language encodings.

Food items are lowercase single words (the answer grammars split on commas
and whitespace); person names are capitalized single words, distinct from any
food item.  The lists are deliberately oversized: an instance needs one item
per variable and one name per clause (m can exceed 100 on the dense end of
the grid).
"""

FOOD_ITEMS: tuple[str, ...] = (
    "nachos", "ratatouille", "pie", "burger", "ravioli", "naan", "curry",
    "tandoori", "sushi", "paella", "falafel", "hummus", "tacos", "lasagna",
    "gnocchi", "risotto", "polenta", "goulash", "pierogi", "schnitzel",
    "baklava", "tiramisu", "gazpacho", "quiche", "crepes", "waffles",
    "pancakes", "omelette", "chowder", "gumbo", "jambalaya", "ceviche",
    "empanada", "samosa", "biryani", "dal", "kebab", "shawarma", "gyros",
    "moussaka", "dolma", "tabbouleh", "couscous", "tagine", "pho", "ramen",
    "udon", "tempura", "teriyaki", "dumplings", "wontons", "congee",
    "kimchi", "bibimbap", "bulgogi", "satay", "laksa", "rendang", "adobo",
    "arepa", "poutine", "bruschetta", "focaccia", "calzone", "strudel",
    "churros", "flan", "gelato", "sorbet", "panna", "mochi", "taro",
    "plantain", "okra", "edamame", "borscht", "paneer", "tostada", "tamale",
    "enchilada",
)

PERSON_NAMES: tuple[str, ...] = (
    "Jay", "Ada", "Zoe", "Arun", "Ula", "Ying", "Om", "Bao", "Nic", "Pat",
    "Du", "Kim", "Mia", "Raj", "Lee", "Eva", "Ian", "Amy", "Tom", "Sue",
    "Max", "Ivy", "Sam", "Lin", "Ben", "Fay", "Gus", "Nia", "Rex", "Lou",
    "Wes", "Tia", "Hal", "Ima", "Jon", "Kay", "Lev", "Mo", "Ned", "Ora",
    "Pia", "Quin", "Ria", "Sol", "Tao", "Uma", "Val", "Wim", "Xia", "Yan",
    "Zed", "Abe", "Bea", "Cal", "Dee", "Eli", "Flo", "Gil", "Hana", "Iris",
    "Jude", "Kira", "Liam", "Mara", "Nils", "Opal", "Per", "Rosa", "Sven",
    "Tess", "Ugo", "Vera", "Walt", "Xeno", "Yuri", "Zara", "Anya", "Boris",
    "Cleo", "Dov", "Edna", "Fritz", "Gwen", "Hugo", "Ines", "Jana", "Kofi",
    "Lars", "Mona", "Nora", "Otis", "Priya", "Rolf", "Sana", "Timo", "Ulla",
    "Vik", "Wanda", "Xander", "Yara", "Zane", "Aldo", "Bianca", "Coral",
    "Dante", "Elif", "Farid", "Greta", "Heidi", "Igor", "Jorge", "Katya",
    "Luca", "Marek", "Nadia", "Olga", "Pablo", "Ravi", "Selma", "Tariq",
    "Ursula", "Viggo", "Wren", "Ximena", "Yusuf", "Zelda", "Astrid", "Bruno",
    "Carmen", "Dmitri", "Esther", "Felix", "Gloria", "Henrik", "Imani",
    "Jasper", "Keiko", "Lorenzo", "Marisol", "Nestor", "Odette", "Quincy",
)

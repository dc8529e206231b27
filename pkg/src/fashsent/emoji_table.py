"""Shipped emoji -> ascii token table (common emoji, names from the Unicode database).

Variation selectors and skin-tone modifiers are stripped before lookup.
"""

EMOJI_NAMES = {
    "\U0001F600": "grinning_face",
    "\U0001F603": "smiling_face_with_open_mouth",
    "\U0001F604": "smiling_face_with_open_mouth_and_smiling_eyes",
    "\U0001F601": "grinning_face_with_smiling_eyes",
    "\U0001F606": "smiling_face_with_open_mouth_and_tightly_closed_eyes",
    "\U0001F605": "smiling_face_with_open_mouth_and_cold_sweat",
    "\U0001F923": "rolling_on_the_floor_laughing",
    "\U0001F602": "face_with_tears_of_joy",
    "\U0001F642": "slightly_smiling_face",
    "\U0001F643": "upside_down_face",
    "\U0001F609": "winking_face",
    "\U0001F60A": "smiling_face_with_smiling_eyes",
    "\U0001F607": "smiling_face_with_halo",
    "\U0001F970": "smiling_face_with_smiling_eyes_and_three_hearts",
    "\U0001F60D": "smiling_face_with_heart_shaped_eyes",
    "\U0001F929": "grinning_face_with_star_eyes",
    "\U0001F618": "face_throwing_a_kiss",
    "\U0001F617": "kissing_face",
    "\U0001F61A": "kissing_face_with_closed_eyes",
    "\U0001F619": "kissing_face_with_smiling_eyes",
    "\U0001F60B": "face_savouring_delicious_food",
    "\U0001F61B": "face_with_stuck_out_tongue",
    "\U0001F61C": "face_with_stuck_out_tongue_and_winking_eye",
    "\U0001F92A": "grinning_face_with_one_large_and_one_small_eye",
    "\U0001F61D": "face_with_stuck_out_tongue_and_tightly_closed_eyes",
    "\U0001F911": "money_mouth_face",
    "\U0001F917": "hugging_face",
    "\U0001F92D": "smiling_face_with_smiling_eyes_and_hand_covering_mouth",
    "\U0001F92B": "face_with_finger_covering_closed_lips",
    "\U0001F914": "thinking_face",
    "\U0001F910": "zipper_mouth_face",
    "\U0001F928": "face_with_one_eyebrow_raised",
    "\U0001F610": "neutral_face",
    "\U0001F611": "expressionless_face",
    "\U0001F636": "face_without_mouth",
    "\U0001F60F": "smirking_face",
    "\U0001F612": "unamused_face",
    "\U0001F644": "face_with_rolling_eyes",
    "\U0001F62C": "grimacing_face",
    "\U0001F925": "lying_face",
    "\U0001F60C": "relieved_face",
    "\U0001F614": "pensive_face",
    "\U0001F62A": "sleepy_face",
    "\U0001F924": "drooling_face",
    "\U0001F634": "sleeping_face",
    "\U0001F637": "face_with_medical_mask",
    "\U0001F912": "face_with_thermometer",
    "\U0001F915": "face_with_head_bandage",
    "\U0001F922": "nauseated_face",
    "\U0001F92E": "face_with_open_mouth_vomiting",
    "\U0001F927": "sneezing_face",
    "\U0001F975": "overheated_face",
    "\U0001F976": "freezing_face",
    "\U0001F974": "face_with_uneven_eyes_and_wavy_mouth",
    "\U0001F635": "dizzy_face",
    "\U0001F92F": "shocked_face_with_exploding_head",
    "\U0001F920": "face_with_cowboy_hat",
    "\U0001F973": "face_with_party_horn_and_party_hat",
    "\U0001F60E": "smiling_face_with_sunglasses",
    "\U0001F913": "nerd_face",
    "\U0001F9D0": "face_with_monocle",
    "\U0001F615": "confused_face",
    "\U0001F61F": "worried_face",
    "\U0001F641": "slightly_frowning_face",
    "\U0001F62E": "face_with_open_mouth",
    "\U0001F62F": "hushed_face",
    "\U0001F632": "astonished_face",
    "\U0001F633": "flushed_face",
    "\U0001F97A": "face_with_pleading_eyes",
    "\U0001F626": "frowning_face_with_open_mouth",
    "\U0001F627": "anguished_face",
    "\U0001F628": "fearful_face",
    "\U0001F630": "face_with_open_mouth_and_cold_sweat",
    "\U0001F625": "disappointed_but_relieved_face",
    "\U0001F622": "crying_face",
    "\U0001F62D": "loudly_crying_face",
    "\U0001F631": "face_screaming_in_fear",
    "\U0001F616": "confounded_face",
    "\U0001F623": "persevering_face",
    "\U0001F61E": "disappointed_face",
    "\U0001F613": "face_with_cold_sweat",
    "\U0001F629": "weary_face",
    "\U0001F62B": "tired_face",
    "\U0001F971": "yawning_face",
    "\U0001F624": "face_with_look_of_triumph",
    "\U0001F621": "pouting_face",
    "\U0001F620": "angry_face",
    "\U0001F92C": "serious_face_with_symbols_covering_mouth",
    "\U0001F608": "smiling_face_with_horns",
    "\U0001F47F": "imp",
    "\U0001F480": "skull",
    "\U0001F4A9": "pile_of_poo",
    "\U0001F921": "clown_face",
    "\U0001F479": "japanese_ogre",
    "\U0001F47A": "japanese_goblin",
    "\U0001F47B": "ghost",
    "\U0001F47D": "extraterrestrial_alien",
    "\U0001F916": "robot_face",
    "\U0001F63A": "smiling_cat_face_with_open_mouth",
    "\U0001F638": "grinning_cat_face_with_smiling_eyes",
    "\U0001F639": "cat_face_with_tears_of_joy",
    "\U0001F63B": "smiling_cat_face_with_heart_shaped_eyes",
    "\U0001F63C": "cat_face_with_wry_smile",
    "\U0001F63D": "kissing_cat_face_with_closed_eyes",
    "\U0001F640": "weary_cat_face",
    "\U0001F63F": "crying_cat_face",
    "\U0001F63E": "pouting_cat_face",
    "\U0001F648": "see_no_evil_monkey",
    "\U0001F649": "hear_no_evil_monkey",
    "\U0001F64A": "speak_no_evil_monkey",
    "\U0001F48B": "kiss_mark",
    "\U0001F48C": "love_letter",
    "\U0001F498": "heart_with_arrow",
    "\U0001F49D": "heart_with_ribbon",
    "\U0001F496": "sparkling_heart",
    "\U0001F497": "growing_heart",
    "\U0001F493": "beating_heart",
    "\U0001F49E": "revolving_hearts",
    "\U0001F495": "two_hearts",
    "\U0001F49F": "heart_decoration",
    "\U0001F494": "broken_heart",
    "\U0001F9E1": "orange_heart",
    "\U0001F49B": "yellow_heart",
    "\U0001F49A": "green_heart",
    "\U0001F499": "blue_heart",
    "\U0001F49C": "purple_heart",
    "\U0001F90E": "brown_heart",
    "\U0001F5A4": "black_heart",
    "\U0001F90D": "white_heart",
    "\U0001F4AF": "hundred_points_symbol",
    "\U0001F4A2": "anger_symbol",
    "\U0001F4A5": "collision_symbol",
    "\U0001F4AB": "dizzy_symbol",
    "\U0001F4A6": "splashing_sweat_symbol",
    "\U0001F4A8": "dash_symbol",
    "\U0001F4AC": "speech_balloon",
    "\U0001F4AD": "thought_balloon",
    "\U0001F4A4": "sleeping_symbol",
    "\U0001F44B": "waving_hand_sign",
    "\U0001F91A": "raised_back_of_hand",
    "\U0000270B": "raised_hand",
    "\U0001F596": "raised_hand_with_part_between_middle_and_ring_fingers",
    "\U0001F44C": "ok_hand_sign",
    "\U0001F90F": "pinching_hand",
    "\U0000270C": "victory_hand",
    "\U0001F91E": "hand_with_index_and_middle_fingers_crossed",
    "\U0001F91F": "i_love_you_hand_sign",
    "\U0001F918": "sign_of_the_horns",
    "\U0001F919": "call_me_hand",
    "\U0001F448": "white_left_pointing_backhand_index",
    "\U0001F449": "white_right_pointing_backhand_index",
    "\U0001F446": "white_up_pointing_backhand_index",
    "\U0001F447": "white_down_pointing_backhand_index",
    "\U0001F44D": "thumbs_up_sign",
    "\U0001F44E": "thumbs_down_sign",
    "\U0000270A": "raised_fist",
    "\U0001F44A": "fisted_hand_sign",
    "\U0001F91B": "left_facing_fist",
    "\U0001F91C": "right_facing_fist",
    "\U0001F44F": "clapping_hands_sign",
    "\U0001F64C": "person_raising_both_hands_in_celebration",
    "\U0001F450": "open_hands_sign",
    "\U0001F932": "palms_up_together",
    "\U0001F91D": "handshake",
    "\U0001F64F": "person_with_folded_hands",
    "\U0001F485": "nail_polish",
    "\U0001F933": "selfie",
    "\U0001F4AA": "flexed_biceps",
    "\U0001F440": "eyes",
    "\U0001F441": "eye",
    "\U0001F445": "tongue",
    "\U0001F444": "mouth",
    "\U0001F476": "baby",
    "\U0001F467": "girl",
    "\U0001F466": "boy",
    "\U0001F469": "woman",
    "\U0001F468": "man",
    "\U0001F471": "person_with_blond_hair",
    "\U0001F475": "older_woman",
    "\U0001F474": "older_man",
    "\U0001F483": "dancer",
    "\U0001F57A": "man_dancing",
    "\U0001F46F": "woman_with_bunny_ears",
    "\U0001F457": "dress",
    "\U0001F455": "t_shirt",
    "\U0001F456": "jeans",
    "\U0001F454": "necktie",
    "\U0001F9E3": "scarf",
    "\U0001F9E4": "gloves",
    "\U0001F9E5": "coat",
    "\U0001F9E6": "socks",
    "\U0001F458": "kimono",
    "\U0001F459": "bikini",
    "\U0001F45A": "womans_clothes",
    "\U0001F45B": "purse",
    "\U0001F45C": "handbag",
    "\U0001F45D": "pouch",
    "\U0001F6CD": "shopping_bags",
    "\U0001F392": "school_satchel",
    "\U0001F45E": "mans_shoe",
    "\U0001F45F": "athletic_shoe",
    "\U0001F97E": "hiking_boot",
    "\U0001F97F": "flat_shoe",
    "\U0001F460": "high_heeled_shoe",
    "\U0001F461": "womans_sandal",
    "\U0001F462": "womans_boots",
    "\U0001F451": "crown",
    "\U0001F452": "womans_hat",
    "\U0001F3A9": "top_hat",
    "\U0001F393": "graduation_cap",
    "\U0001F9E2": "billed_cap",
    "\U0001F484": "lipstick",
    "\U0001F48D": "ring",
    "\U0001F48E": "gem_stone",
    "\U0001F453": "eyeglasses",
    "\U0001F576": "dark_sunglasses",
    "\U0001F97D": "goggles",
    "\U0001F302": "closed_umbrella",
    "\U0001F525": "fire",
    "\U00002728": "sparkles",
    "\U0001F31F": "glowing_star",
    "\U00002B50": "white_medium_star",
    "\U0001F308": "rainbow",
    "\U00002600": "black_sun_with_rays",
    "\U0001F319": "crescent_moon",
    "\U000026A1": "high_voltage_sign",
    "\U00002744": "snowflake",
    "\U0001F338": "cherry_blossom",
    "\U0001F339": "rose",
    "\U0001F33A": "hibiscus",
    "\U0001F33B": "sunflower",
    "\U0001F33C": "blossom",
    "\U0001F337": "tulip",
    "\U0001F340": "four_leaf_clover",
    "\U0001F381": "wrapped_present",
    "\U0001F388": "balloon",
    "\U0001F389": "party_popper",
    "\U0001F38A": "confetti_ball",
    "\U0001F380": "ribbon",
    "\U0001F3C6": "trophy",
    "\U0001F4F8": "camera_with_flash",
    "\U0001F4F7": "camera",
    "\U0001F3B6": "multiple_musical_notes",
    "\U0001F3B5": "musical_note",
    "\U0001F6D2": "shopping_trolley",
    "\U0001F4B0": "money_bag",
    "\U0001F4B8": "money_with_wings",
    "\U0001F4B5": "banknote_with_dollar_sign",
    "\U0001F3F7": "label",
    "\U00002714": "heavy_check_mark",
    "\U00002705": "white_heavy_check_mark",
    "\U0000274C": "cross_mark",
    "\U00002757": "heavy_exclamation_mark_symbol",
    "\U00002753": "black_question_mark_ornament",
    "\U0001F195": "squared_new",
    "\U0001F51D": "top_with_upwards_arrow_above",
    "\U0001F192": "squared_cool",
    "\U0001F4CD": "round_pushpin",
    "\U0001F30D": "earth_globe_europe_africa",
    "\U00002764": "red_heart",
    "\U0000263A": "smiling_face",
}
